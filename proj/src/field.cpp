#include "trail/field.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace trail {

namespace {

// Numerically safe logistic with derivative.
void logistic(double x, double* value, double* deriv) {
  double s;
  if (x >= 0.0) {
    s = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    s = e / (1.0 + e);
  }
  *value = s;
  *deriv = s * (1.0 - s);
}

}  // namespace

FieldSample AnalyticField::sample(Point2 p) const {
  FieldSample out;
  out.value = base_;
  for (const Plane& pl : planes_) {
    out.value += pl.ax * p.x + pl.by * p.y + pl.c;
    out.gradient.x += pl.ax;
    out.gradient.y += pl.by;
  }
  for (const GaussianBump& b : bumps_) {
    const Vec2 d = p - b.center;
    const double s2 = b.sigma * b.sigma;
    const double g = b.amplitude * std::exp(-0.5 * squared_norm(d) / s2);
    out.value += g;
    out.gradient.x += -g * d.x / s2;
    out.gradient.y += -g * d.y / s2;
  }
  for (const SmoothBox& b : boxes_) {
    double sx0, dx0, sx1, dx1, sy0, dy0, sy1, dy1;
    logistic((p.x - b.rect.x_min) / b.edge, &sx0, &dx0);
    logistic((b.rect.x_max - p.x) / b.edge, &sx1, &dx1);
    logistic((p.y - b.rect.y_min) / b.edge, &sy0, &dy0);
    logistic((b.rect.y_max - p.y) / b.edge, &sy1, &dy1);
    const double prod = sx0 * sx1 * sy0 * sy1;
    out.value += b.height * prod;
    // d/dx of sx0 is dx0/edge, of sx1 is -dx1/edge
    out.gradient.x += b.height * sy0 * sy1 * (dx0 * sx1 - sx0 * dx1) / b.edge;
    out.gradient.y += b.height * sx0 * sx1 * (dy0 * sy1 - sy0 * dy1) / b.edge;
  }
  return out;
}

FieldSample SquashedField::sample(Point2 p) const {
  const FieldSample in = inner_->query(p);
  double s, d;
  logistic(in.value, &s, &d);
  return {s, {d * in.gradient.x, d * in.gradient.y}};
}

std::shared_ptr<const TerrainField> squash_to_unit(std::shared_ptr<const TerrainField> inner) {
  return std::make_shared<SquashedField>(std::move(inner));
}

FieldSample SumField::sample(Point2 p) const {
  FieldSample out;
  for (const auto& f : parts_) {
    const FieldSample s = f->query(p);
    out.value += s.value;
    out.gradient += s.gradient;
  }
  return out;
}

// -- GriddedField ------------------------------------------------------------

GriddedField::GriddedField(Point2 origin, double resolution, int rows, int cols,
                           std::vector<double> values, Interp interp, BoundsPolicy policy)
    : TerrainField(Bounds{origin.x, origin.x + cols * resolution,
                          origin.y, origin.y + rows * resolution},
                   policy),
      origin_(origin),
      resolution_(resolution),
      rows_(rows),
      cols_(cols),
      values_(std::move(values)),
      interp_(interp) {
  if (rows_ < 1 || cols_ < 1) throw ShapeMismatch("grid needs at least one cell");
  if (resolution_ <= 0.0) throw ConfigInvalid("grid resolution must be positive");
  if (values_.size() != static_cast<std::size_t>(rows_) * cols_) {
    throw ShapeMismatch("grid value count does not match rows*cols");
  }
}

// Linear extension one cell beyond each edge; the bicubic stencil never asks
// for more than that because lattice coordinates are clamped first.
double GriddedField::cell_ext(int r, int c) const {
  if (r < 0) return 2.0 * cell_ext(0, c) - cell_ext(rows_ > 1 ? 1 : 0, c);
  if (r >= rows_) return 2.0 * cell_ext(rows_ - 1, c) - cell_ext(rows_ > 1 ? rows_ - 2 : rows_ - 1, c);
  if (c < 0) return 2.0 * cell(r, 0) - cell(r, cols_ > 1 ? 1 : 0);
  if (c >= cols_) return 2.0 * cell(r, cols_ - 1) - cell(r, cols_ > 1 ? cols_ - 2 : cols_ - 1);
  return cell(r, c);
}

namespace {

// Catmull-Rom segment through p1 (x=0) and p2 (x=1), tangents from p0/p3.
void hermite(double p0, double p1, double p2, double p3, double x, double* f, double* dfdx) {
  const double a = 0.5 * (-p0 + 3.0 * p1 - 3.0 * p2 + p3);
  const double b = 0.5 * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3);
  const double c = 0.5 * (-p0 + p2);
  const double d = p1;
  *f = d + x * (c + x * (b + x * a));
  *dfdx = c + x * (2.0 * b + 3.0 * a * x);
}

}  // namespace

FieldSample GriddedField::sample_bilinear(double u, double v) const {
  // u is the column coordinate, v the row coordinate, both clamped already.
  int c0 = std::min(static_cast<int>(std::floor(u)), cols_ - 2);
  int r0 = std::min(static_cast<int>(std::floor(v)), rows_ - 2);
  c0 = std::max(c0, 0);
  r0 = std::max(r0, 0);
  const double fx = cols_ > 1 ? u - c0 : 0.0;
  const double fy = rows_ > 1 ? v - r0 : 0.0;
  const int c1 = std::min(c0 + 1, cols_ - 1);
  const int r1 = std::min(r0 + 1, rows_ - 1);
  const double v00 = cell(r0, c0), v01 = cell(r0, c1);
  const double v10 = cell(r1, c0), v11 = cell(r1, c1);
  FieldSample out;
  out.value = (1.0 - fy) * ((1.0 - fx) * v00 + fx * v01) + fy * ((1.0 - fx) * v10 + fx * v11);
  out.gradient.x = ((1.0 - fy) * (v01 - v00) + fy * (v11 - v10)) / resolution_;
  out.gradient.y = ((1.0 - fx) * (v10 - v00) + fx * (v11 - v01)) / resolution_;
  return out;
}

FieldSample GriddedField::sample_bicubic(double u, double v) const {
  const int c0 = static_cast<int>(std::floor(u));
  const int r0 = static_cast<int>(std::floor(v));
  const double fx = u - c0;
  const double fy = v - r0;
  double rowf[4], rowdx[4];
  for (int i = 0; i < 4; ++i) {
    const int r = r0 - 1 + i;
    hermite(cell_ext(r, c0 - 1), cell_ext(r, c0), cell_ext(r, c0 + 1), cell_ext(r, c0 + 2),
            fx, &rowf[i], &rowdx[i]);
  }
  FieldSample out;
  double dfdy, unused;
  hermite(rowf[0], rowf[1], rowf[2], rowf[3], fy, &out.value, &dfdy);
  double dfdx;
  hermite(rowdx[0], rowdx[1], rowdx[2], rowdx[3], fy, &dfdx, &unused);
  out.gradient.x = dfdx / resolution_;
  out.gradient.y = dfdy / resolution_;
  return out;
}

FieldSample GriddedField::sample(Point2 p) const {
  // Lattice coordinates: sample (r, c) sits at origin + ((c+0.5), (r+0.5))*res.
  double u = (p.x - origin_.x) / resolution_ - 0.5;
  double v = (p.y - origin_.y) / resolution_ - 0.5;
  const double u_raw = u, v_raw = v;
  u = std::clamp(u, 0.0, static_cast<double>(cols_ - 1));
  v = std::clamp(v, 0.0, static_cast<double>(rows_ - 1));
  FieldSample s = interp_ == Interp::Bilinear ? sample_bilinear(u, v) : sample_bicubic(u, v);
  // Between the outermost sample and the region edge the value is held, so
  // the derivative along a clamped coordinate is zero.
  if (u != u_raw) s.gradient.x = 0.0;
  if (v != v_raw) s.gradient.y = 0.0;
  return s;
}

GriddedField GriddedField::from_raster_json(const std::string& json_text, Interp interp,
                                            BoundsPolicy policy) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  for (const char* key : {"origin_x", "origin_y", "resolution", "rows", "cols", "values"}) {
    if (!j.contains(key)) throw ConfigInvalid(std::string("raster JSON missing key: ") + key);
  }
  return GriddedField({j["origin_x"].get<double>(), j["origin_y"].get<double>()},
                      j["resolution"].get<double>(), j["rows"].get<int>(), j["cols"].get<int>(),
                      j["values"].get<std::vector<double>>(), interp, policy);
}

std::string GriddedField::to_raster_json() const {
  nlohmann::json j;
  j["origin_x"] = origin_.x;
  j["origin_y"] = origin_.y;
  j["resolution"] = resolution_;
  j["rows"] = rows_;
  j["cols"] = cols_;
  j["values"] = values_;
  return j.dump();
}

double bumpiness_label(double accel_rms, double speed, double scale, double offset) {
  if (speed <= 0.05) throw DegenerateSpeed("speed too small for a bumpiness label");
  double s, d;
  logistic(scale * (accel_rms / speed) + offset, &s, &d);
  return s;
}

}  // namespace trail
