#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"

#include "trail/field.hpp"

using namespace trail;

namespace {

double logistic_ref(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// Samples of f at the cell centers of a rows x cols lattice.
template <class F>
std::vector<double> sample_centers(Point2 origin, double res, int rows, int cols, F f) {
  std::vector<double> vals(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double x = origin.x + (c + 0.5) * res;
      const double y = origin.y + (r + 0.5) * res;
      vals[static_cast<std::size_t>(r) * cols + c] = f(x, y);
    }
  }
  return vals;
}

}  // namespace

TEST_CASE("analytic field sums base, plane and gaussian closed forms") {
  AnalyticField f({-10.0, 10.0, -10.0, 10.0});
  f.add_constant(0.3);
  f.add_plane({0.5, -0.25, 1.0});
  f.add_bump({{1.0, 2.0}, 2.0, 0.8});

  const Point2 p{0.4, 1.1};
  const double dx = p.x - 1.0, dy = p.y - 2.0;
  const double g = 2.0 * std::exp(-(dx * dx + dy * dy) / (2.0 * 0.8 * 0.8));
  const double want_v = 0.3 + (0.5 * p.x - 0.25 * p.y + 1.0) + g;
  const double want_gx = 0.5 - g * dx / (0.8 * 0.8);
  const double want_gy = -0.25 - g * dy / (0.8 * 0.8);

  const FieldSample s = f.query(p);
  CHECK(s.value == doctest::Approx(want_v).epsilon(1e-14));
  CHECK(s.gradient.x == doctest::Approx(want_gx).epsilon(1e-13));
  CHECK(s.gradient.y == doctest::Approx(want_gy).epsilon(1e-13));
}

TEST_CASE("smooth box matches the four-logistic product and its derivative") {
  const Bounds rect{2.0, 6.0, -1.0, 1.0};
  const double h = 0.7, e = 0.2;
  AnalyticField f({-10.0, 10.0, -10.0, 10.0});
  f.add_box({rect, h, e});

  auto box_val = [&](double x, double y) {
    return h * logistic_ref((x - rect.x_min) / e) * logistic_ref((rect.x_max - x) / e) *
           logistic_ref((y - rect.y_min) / e) * logistic_ref((rect.y_max - y) / e);
  };
  const Point2 p{2.3, 0.4};
  const FieldSample s = f.query(p);
  CHECK(s.value == doctest::Approx(box_val(p.x, p.y)).epsilon(1e-12));

  const double fd = 1e-7;
  CHECK(s.gradient.x ==
        doctest::Approx((box_val(p.x + fd, p.y) - box_val(p.x - fd, p.y)) / (2 * fd))
            .epsilon(1e-6));
  CHECK(s.gradient.y ==
        doctest::Approx((box_val(p.x, p.y + fd) - box_val(p.x, p.y - fd)) / (2 * fd))
            .epsilon(1e-6));
}

TEST_CASE("clamp policy pins the point to the boundary and zeroes that gradient axis") {
  AnalyticField f({0.0, 4.0, 0.0, 2.0});
  f.add_plane({1.5, -0.5, 0.0});

  const FieldSample s = f.query({9.0, 1.0});  // far beyond x_max
  CHECK(s.value == doctest::Approx(1.5 * 4.0 - 0.5 * 1.0).epsilon(1e-14));
  CHECK(s.gradient.x == 0.0);
  CHECK(s.gradient.y == doctest::Approx(-0.5));

  const FieldSample corner = f.query({-1.0, 5.0});
  CHECK(corner.value == doctest::Approx(-0.5 * 2.0).epsilon(1e-14));
  CHECK(corner.gradient.x == 0.0);
  CHECK(corner.gradient.y == 0.0);
}

TEST_CASE("strict policy throws outside bounds") {
  AnalyticField f({0.0, 1.0, 0.0, 1.0}, BoundsPolicy::Strict);
  CHECK_NOTHROW(f.query({0.5, 0.5}));
  CHECK_THROWS_AS(f.query({1.5, 0.5}), OutOfBounds);
}

TEST_CASE("squash maps through the logistic with chain-rule gradient") {
  auto inner = std::make_shared<AnalyticField>(Bounds{-5.0, 5.0, -5.0, 5.0});
  inner->add_plane({2.0, 0.0, -1.0});
  auto sq = squash_to_unit(inner);

  const Point2 p{0.7, 0.0};
  const double t = 2.0 * p.x - 1.0;
  const double l = logistic_ref(t);
  const FieldSample s = sq->query(p);
  CHECK(s.value == doctest::Approx(l).epsilon(1e-14));
  CHECK(s.gradient.x == doctest::Approx(l * (1.0 - l) * 2.0).epsilon(1e-12));
  CHECK(s.gradient.y == doctest::Approx(0.0));
  CHECK(s.value > 0.0);
  CHECK(s.value < 1.0);
}

TEST_CASE("sum field adds parts pointwise") {
  const Bounds b{-5.0, 5.0, -5.0, 5.0};
  auto a = std::make_shared<AnalyticField>(b);
  a->add_constant(0.25);
  auto p = std::make_shared<AnalyticField>(b);
  p->add_plane({1.0, 1.0, 0.0});
  SumField sum(b, {a, p});

  const FieldSample s = sum.query({2.0, -1.0});
  CHECK(s.value == doctest::Approx(0.25 + 1.0).epsilon(1e-14));
  CHECK(s.gradient.x == doctest::Approx(1.0));
  CHECK(s.gradient.y == doctest::Approx(1.0));
}

TEST_CASE("bilinear grid reproduces a linear function exactly in the interior") {
  const Point2 origin{-1.0, -2.0};
  const double res = 0.5;
  const int rows = 8, cols = 10;
  auto lin = [](double x, double y) { return 2.0 * x - 3.0 * y + 1.0; };
  GriddedField g(origin, res, rows, cols, sample_centers(origin, res, rows, cols, lin),
                 GriddedField::Interp::Bilinear);

  for (const Point2 p : {Point2{0.1, -0.3}, Point2{1.37, -1.02}, Point2{2.9, 0.81}}) {
    const FieldSample s = g.query(p);
    CHECK(s.value == doctest::Approx(lin(p.x, p.y)).epsilon(1e-12));
    CHECK(s.gradient.x == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s.gradient.y == doctest::Approx(-3.0).epsilon(1e-12));
  }
}

TEST_CASE("bicubic grid reproduces a quadratic exactly away from the edges") {
  const Point2 origin{0.0, 0.0};
  const double res = 0.25;
  const int rows = 16, cols = 16;
  auto quad = [](double x, double y) { return x * x + 0.5 * y; };
  GriddedField g(origin, res, rows, cols, sample_centers(origin, res, rows, cols, quad),
                 GriddedField::Interp::Bicubic);

  for (const Point2 p : {Point2{1.3, 2.1}, Point2{2.02, 1.17}, Point2{1.71, 2.64}}) {
    const FieldSample s = g.query(p);
    CHECK(s.value == doctest::Approx(quad(p.x, p.y)).epsilon(1e-11));
    CHECK(s.gradient.x == doctest::Approx(2.0 * p.x).epsilon(1e-10));
    CHECK(s.gradient.y == doctest::Approx(0.5).epsilon(1e-10));
  }
}

TEST_CASE("bicubic interpolation is C1 across cell boundaries") {
  const Point2 origin{0.0, 0.0};
  const double res = 0.5;
  const int rows = 10, cols = 10;
  auto wavy = [](double x, double y) { return std::sin(1.3 * x) * std::cos(0.9 * y); };
  GriddedField g(origin, res, rows, cols, sample_centers(origin, res, rows, cols, wavy),
                 GriddedField::Interp::Bicubic);

  // x = origin + (c + 0.5) * res are the sample abscissae; the cell boundary
  // between stencils sits at those lattice lines.
  const double xb = origin.x + (4 + 0.5) * res;
  const double y = 2.3;
  const double eps = 1e-7;
  const FieldSample lo = g.query({xb - eps, y});
  const FieldSample hi = g.query({xb + eps, y});
  CHECK(std::abs(lo.value - hi.value) < 1e-6);
  CHECK(std::abs(lo.gradient.x - hi.gradient.x) < 1e-5);
  CHECK(std::abs(lo.gradient.y - hi.gradient.y) < 1e-5);
}

TEST_CASE("grid queries clamp to the center lattice with zero gradient") {
  const Point2 origin{0.0, 0.0};
  const double res = 1.0;
  const int rows = 4, cols = 4;
  auto lin = [](double x, double y) { return x + 2.0 * y; };
  GriddedField g(origin, res, rows, cols, sample_centers(origin, res, rows, cols, lin),
                 GriddedField::Interp::Bilinear);

  // Inside the bounds rectangle but left of the first column of centers.
  const FieldSample s = g.query({0.1, 2.0});
  CHECK(s.value == doctest::Approx(lin(0.5, 2.0)).epsilon(1e-12));
  CHECK(s.gradient.x == 0.0);
  CHECK(s.gradient.y == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("raster JSON round trip preserves geometry and samples") {
  const Point2 origin{-2.0, 3.0};
  GriddedField g(origin, 0.75, 3, 5,
                 {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15},
                 GriddedField::Interp::Bilinear);
  const std::string text = g.to_raster_json();
  const GriddedField back = GriddedField::from_raster_json(text, GriddedField::Interp::Bilinear);
  CHECK(back.rows() == 3);
  CHECK(back.cols() == 5);
  CHECK(back.resolution() == 0.75);
  CHECK(back.origin().x == -2.0);
  CHECK(back.origin().y == 3.0);
  CHECK(back.values() == g.values());
  CHECK_THROWS_AS(GriddedField::from_raster_json("{\"rows\": 2}"), ConfigInvalid);
}

TEST_CASE("grid construction validates shape and resolution") {
  CHECK_THROWS_AS(GriddedField({0, 0}, 1.0, 2, 2, {1.0, 2.0, 3.0}), ShapeMismatch);
  CHECK_THROWS_AS(GriddedField({0, 0}, 0.0, 1, 1, {1.0}), ConfigInvalid);
  CHECK_THROWS_AS(GriddedField({0, 0}, 1.0, 0, 1, {}), ShapeMismatch);
}

TEST_CASE("bumpiness label is a logistic of accel over speed") {
  const double accel = 0.8, speed = 2.0, scale = 1.5, offset = -0.4;
  const double want = logistic_ref(scale * (accel / speed) + offset);
  CHECK(bumpiness_label(accel, speed, scale, offset) == doctest::Approx(want).epsilon(1e-14));
  CHECK(bumpiness_label(0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(bumpiness_label(1.0, 0.04), DegenerateSpeed);
  CHECK_THROWS_AS(bumpiness_label(1.0, 0.0), DegenerateSpeed);
}
