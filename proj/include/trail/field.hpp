#pragma once

#include <memory>
#include <string>
#include <vector>

#include "trail/errors.hpp"
#include "trail/geometry.hpp"

namespace trail {

struct FieldSample {
  double value = 0.0;
  Vec2 gradient{0.0, 0.0};
};

enum class BoundsPolicy {
  Clamp,   // queries outside bounds are clamped onto the boundary
  Strict,  // queries outside bounds throw OutOfBounds
};

// Continuous scalar field over a rectangular region. Implementations return
// the value together with the exact gradient of the implemented form, so
// downstream gradient-based code never needs finite differences.
class TerrainField {
 public:
  TerrainField(Bounds bounds, BoundsPolicy policy)
      : bounds_(bounds), policy_(policy) {}
  virtual ~TerrainField() = default;

  const Bounds& bounds() const { return bounds_; }
  BoundsPolicy policy() const { return policy_; }

  // With the clamp policy the composite map p -> sample(clamp(p)) is what we
  // differentiate, so clamped coordinates get a zero gradient component.
  FieldSample query(Point2 p) const {
    if (bounds_.contains(p)) return sample(p);
    if (policy_ == BoundsPolicy::Strict) {
      throw OutOfBounds("field query outside bounds");
    }
    const Point2 q = bounds_.clamp(p);
    FieldSample s = sample(q);
    if (q.x != p.x) s.gradient.x = 0.0;
    if (q.y != p.y) s.gradient.y = 0.0;
    return s;
  }

 protected:
  virtual FieldSample sample(Point2 p) const = 0;

 private:
  Bounds bounds_;
  BoundsPolicy policy_;
};

// -- analytic primitives -------------------------------------------------

struct GaussianBump {
  Point2 center;
  double amplitude = 1.0;
  double sigma = 1.0;
};

struct Plane {
  double ax = 0.0;  // slope along x
  double by = 0.0;  // slope along y
  double c = 0.0;   // offset
};

// Smooth plateau: height * product of logistic edges around `rect`.
// `edge` controls how sharp the walls are (smaller = steeper).
struct SmoothBox {
  Bounds rect;
  double height = 1.0;
  double edge = 0.1;
};

// Sum of a constant base and analytic primitives, everything closed form.
class AnalyticField : public TerrainField {
 public:
  AnalyticField(Bounds bounds, BoundsPolicy policy = BoundsPolicy::Clamp)
      : TerrainField(bounds, policy) {}

  AnalyticField& add_constant(double c) {
    base_ += c;
    return *this;
  }
  AnalyticField& add_plane(Plane p) {
    planes_.push_back(p);
    return *this;
  }
  AnalyticField& add_bump(GaussianBump b) {
    bumps_.push_back(b);
    return *this;
  }
  AnalyticField& add_box(SmoothBox b) {
    boxes_.push_back(b);
    return *this;
  }

 protected:
  FieldSample sample(Point2 p) const override;

 private:
  double base_ = 0.0;
  std::vector<Plane> planes_;
  std::vector<GaussianBump> bumps_;
  std::vector<SmoothBox> boxes_;
};

// Logistic squash of another field into (0, 1), gradient by chain rule.
class SquashedField : public TerrainField {
 public:
  explicit SquashedField(std::shared_ptr<const TerrainField> inner)
      : TerrainField(inner->bounds(), inner->policy()), inner_(std::move(inner)) {}

 protected:
  FieldSample sample(Point2 p) const override;

 private:
  std::shared_ptr<const TerrainField> inner_;
};

std::shared_ptr<const TerrainField> squash_to_unit(std::shared_ptr<const TerrainField> inner);

// Pointwise sum of several fields that share a region.
class SumField : public TerrainField {
 public:
  SumField(Bounds bounds, std::vector<std::shared_ptr<const TerrainField>> parts,
           BoundsPolicy policy = BoundsPolicy::Clamp)
      : TerrainField(bounds, policy), parts_(std::move(parts)) {}

 protected:
  FieldSample sample(Point2 p) const override;

 private:
  std::vector<std::shared_ptr<const TerrainField>> parts_;
};

// -- gridded samples -------------------------------------------------------

// Values sampled at cell centers on a regular grid, interpolated in between.
// Bilinear is C0; bicubic uses the Catmull-Rom kernel and is C1 across cell
// boundaries. Queries outside the center lattice clamp to the edge samples.
class GriddedField : public TerrainField {
 public:
  enum class Interp { Bilinear, Bicubic };

  GriddedField(Point2 origin, double resolution, int rows, int cols,
               std::vector<double> values, Interp interp = Interp::Bicubic,
               BoundsPolicy policy = BoundsPolicy::Clamp);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double resolution() const { return resolution_; }
  Point2 origin() const { return origin_; }
  const std::vector<double>& values() const { return values_; }

  // Raster JSON schema: {origin_x, origin_y, resolution, rows, cols, values}
  // with `values` row-major, row 0 at origin_y.
  static GriddedField from_raster_json(const std::string& json_text,
                                       Interp interp = Interp::Bicubic,
                                       BoundsPolicy policy = BoundsPolicy::Clamp);
  std::string to_raster_json() const;

 protected:
  FieldSample sample(Point2 p) const override;

 private:
  double cell(int r, int c) const { return values_[static_cast<std::size_t>(r) * cols_ + c]; }
  double cell_ext(int r, int c) const;
  FieldSample sample_bilinear(double u, double v) const;
  FieldSample sample_bicubic(double u, double v) const;

  Point2 origin_;
  double resolution_;
  int rows_, cols_;
  std::vector<double> values_;
  Interp interp_;
};

// Terrain roughness label in (0, 1): logistic of vertical acceleration RMS
// normalized by travel speed. Near-zero speed makes the ratio meaningless.
double bumpiness_label(double accel_rms, double speed, double scale = 1.0, double offset = 0.0);

}  // namespace trail
