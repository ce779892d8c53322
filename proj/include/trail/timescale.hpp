#pragma once

#include <string>
#include <vector>

#include "trail/geometry.hpp"
#include "trail/spline.hpp"
#include "trail/trajopt.hpp"

namespace trail {

struct VehicleLimits {
  double v_max = 3.0;      // m/s
  double v_min = 0.0;      // m/s
  double a_lat_max = 2.0;  // m/s^2
  double a_acc = 2.0;      // m/s^2, forward
  double a_dec = 2.0;      // m/s^2, braking
  double omega_min = -2.5;  // rad/s
  double omega_max = 2.5;   // rad/s
};

struct TrajectorySample {
  Point2 point;
  double yaw = 0.0;
  double v = 0.0;
  double omega = 0.0;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<Point2> points;
  std::vector<double> yaw;    // unwrapped, continuous
  std::vector<double> v;
  std::vector<double> omega;

  std::size_t size() const { return t.size(); }
  bool empty() const { return t.empty(); }
  double duration() const { return t.empty() ? 0.0 : t.back(); }

  // Linear interpolation in time; clamps to the ends.
  TrajectorySample sample_at(double time) const;

  // JSON array of {t, x, y, yaw, v, omega}.
  std::string to_json() const;
  static Trajectory from_json(const std::string& text);
};

// Forward/backward velocity-profile pass along the dense path. Per-sample
// hard speed target:
//   v_hat_i = min(v_max, sqrt(a_lat_max/(|kappa_i|+eps)), v_pref_i, omega cap)
// then v_{i+1}^2 <= v_i^2 + 2 a_acc ds (forward from v_start) and
// v_i^2 <= v_{i+1}^2 + 2 a_dec ds (backward to v_end). Timestamps integrate
// t_{i+1} = t_i + 2 ds_i / (v_i + v_{i+1}). Pass an empty bump_vals to skip
// the bumpiness preference cap.
Trajectory time_scale(const DensePath& path, const std::vector<double>& bump_vals,
                      const VehicleLimits& limits, const SpeedParams& params, double v_start,
                      double v_end);

}  // namespace trail
