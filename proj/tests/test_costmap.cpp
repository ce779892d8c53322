#include <cmath>
#include <memory>

#include "doctest.h"

#include "trail/costmap.hpp"
#include "trail/field.hpp"

using namespace trail;

TEST_CASE("world_to_cell floors into the grid and rejects outside points") {
  CostGrid g;
  g.origin = {1.0, 2.0};
  g.resolution = 0.5;
  g.rows = 4;
  g.cols = 6;
  g.cost.assign(24, 0.0);

  GridIndex i;
  REQUIRE(g.world_to_cell({1.74, 2.99}, &i));
  CHECK(i.row == 1);
  CHECK(i.col == 1);
  REQUIRE(g.world_to_cell({1.0, 2.0}, &i));  // lower-left corner belongs to cell (0,0)
  CHECK(i.row == 0);
  CHECK(i.col == 0);
  CHECK_FALSE(g.world_to_cell({4.0, 3.0}, &i));  // x_max edge falls past the last column
  CHECK_FALSE(g.world_to_cell({0.9, 3.0}, &i));

  const Point2 c = g.cell_center({2, 3});
  CHECK(c.x == doctest::Approx(1.0 + 3.5 * 0.5));
  CHECK(c.y == doctest::Approx(2.0 + 2.5 * 0.5));
}

TEST_CASE("flat elevation produces an all-zero costmap of the expected shape") {
  AnalyticField flat({-1.0, 9.0, -1.0, 9.0});
  flat.add_constant(3.0);
  const CostGrid g = build_geometric_costmap(flat, {0.0, 4.0, 0.0, 2.0},
                                             {0.3, 0.2, 0.2});
  CHECK(g.cols == 20);
  CHECK(g.rows == 10);
  for (double c : g.cost) CHECK(c == 0.0);
}

TEST_CASE("planar slope yields the closed-form slope-times-step cost") {
  const double a = 0.15;
  AnalyticField ramp({-1.0, 9.0, -1.0, 9.0});
  ramp.add_plane({a, 0.0, 0.0});
  const GeomCostParams params{0.3, 0.2, 0.2};
  const CostGrid g = build_geometric_costmap(ramp, {0.0, 4.0, 0.0, 2.0}, params);

  // Every cell sees slope a and a largest neighbor step of a*resolution.
  const double want = std::clamp(a / params.max_slope, 0.0, 1.0) *
                      std::clamp(a * params.coarse_resolution / params.max_step, 0.0, 1.0);
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      CHECK(g.at(r, c) == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("a steep bump raises cost on its flank but not far away") {
  AnalyticField field({-10.0, 10.0, -10.0, 10.0});
  field.add_bump({{0.0, 0.0}, 2.0, 0.5});
  const CostGrid g = build_geometric_costmap(field, {-5.0, 5.0, -5.0, 5.0}, {0.3, 0.2, 0.25});

  double peak = 0.0;
  for (double c : g.cost) peak = std::max(peak, c);
  CHECK(peak > 0.5);

  GridIndex corner;
  REQUIRE(g.world_to_cell({-4.8, -4.8}, &corner));
  CHECK(g.at(corner.row, corner.col) < 1e-6);
}

TEST_CASE("costmap construction validates region and parameters") {
  AnalyticField small({0.0, 1.0, 0.0, 1.0});
  CHECK_THROWS_AS(build_geometric_costmap(small, {0.0, 2.0, 0.0, 1.0}, GeomCostParams{}),
                  RegionOutOfBounds);
  AnalyticField wide({-10.0, 10.0, -10.0, 10.0});
  CHECK_THROWS_AS(build_geometric_costmap(wide, {0.0, 1.0, 0.0, 1.0}, {0.0, 0.2, 0.25}),
                  ConfigInvalid);
  CHECK_THROWS_AS(build_geometric_costmap(wide, {0.0, 0.0, 0.0, 1.0}, GeomCostParams{}),
                  EmptyRegion);
}

TEST_CASE("blend is the exact convex combination and validates inputs") {
  CostGrid a;
  a.origin = {0.0, 0.0};
  a.resolution = 1.0;
  a.rows = 2;
  a.cols = 2;
  a.cost = {0.0, 0.2, 0.4, 1.0};
  CostGrid b = a;
  b.cost = {1.0, 0.0, 0.5, 0.5};

  const CostGrid m = blend_costmaps(a, b, 0.25);
  for (int i = 0; i < 4; ++i) {
    CHECK(m.cost[i] == doctest::Approx(0.25 * a.cost[i] + 0.75 * b.cost[i]).epsilon(1e-15));
  }

  CostGrid c = a;
  c.cols = 1;
  c.cost = {0.0, 0.0};
  CHECK_THROWS_AS(blend_costmaps(a, c, 0.5), ShapeMismatch);
  CHECK_THROWS_AS(blend_costmaps(a, b, 1.5), ConfigInvalid);
  CHECK_THROWS_AS(blend_costmaps(a, b, -0.1), ConfigInvalid);
}

TEST_CASE("rasterized bumpiness equals the field at cell centers") {
  AnalyticField bump({-10.0, 10.0, -10.0, 10.0});
  bump.add_constant(0.1);
  bump.add_bump({{1.0, 1.0}, 0.6, 0.7});
  const Bounds region{0.0, 3.0, 0.0, 2.0};
  const CostGrid g = rasterize_bumpiness(bump, region, 0.5);
  CHECK(g.cols == 6);
  CHECK(g.rows == 4);
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      CHECK(g.at(r, c) == bump.query(g.cell_center({r, c})).value);
    }
  }
  AnalyticField tiny({0.0, 1.0, 0.0, 1.0});
  CHECK_THROWS_AS(rasterize_bumpiness(tiny, region, 0.5), RegionOutOfBounds);
}

TEST_CASE("inflation dilates with a disk and keeps the peak value") {
  CostGrid g;
  g.origin = {0.0, 0.0};
  g.resolution = 1.0;
  g.rows = 9;
  g.cols = 9;
  g.cost.assign(81, 0.0);
  g.at(4, 4) = 1.0;

  const double radius = 2.3;
  const CostGrid out = inflate(g, radius);
  for (int r = 0; r < 9; ++r) {
    for (int c = 0; c < 9; ++c) {
      const double d2 = double(r - 4) * (r - 4) + double(c - 4) * (c - 4);
      const double want = d2 <= radius * radius ? 1.0 : 0.0;
      CHECK(out.at(r, c) == want);
    }
  }

  const CostGrid same = inflate(g, 0.0);
  CHECK(same.cost == g.cost);
}

TEST_CASE("cost grid raster JSON round trips") {
  CostGrid g;
  g.origin = {-1.0, 2.0};
  g.resolution = 0.25;
  g.rows = 2;
  g.cols = 3;
  g.cost = {0.0, 0.5, 1.0, 0.25, 0.75, 0.125};
  const CostGrid back = CostGrid::from_raster_json(g.to_raster_json());
  CHECK(back.rows == g.rows);
  CHECK(back.cols == g.cols);
  CHECK(back.resolution == g.resolution);
  CHECK(back.origin.x == g.origin.x);
  CHECK(back.origin.y == g.origin.y);
  CHECK(back.cost == g.cost);
  CHECK_THROWS_AS(CostGrid::from_raster_json(
                      "{\"origin_x\":0,\"origin_y\":0,\"resolution\":1,"
                      "\"rows\":2,\"cols\":2,\"values\":[1,2,3]}"),
                  ShapeMismatch);
}
