#include "trail/timescale.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "trail/errors.hpp"

namespace trail {

TrajectorySample Trajectory::sample_at(double time) const {
  if (t.empty()) throw EmptyLog("cannot sample an empty trajectory");
  if (time <= t.front()) return {points.front(), yaw.front(), v.front(), omega.front()};
  if (time >= t.back()) return {points.back(), yaw.back(), v.back(), omega.back()};
  const auto it = std::upper_bound(t.begin(), t.end(), time);
  const std::size_t i = static_cast<std::size_t>(it - t.begin()) - 1;
  const double den = t[i + 1] - t[i];
  const double a = den > 0.0 ? (time - t[i]) / den : 0.0;
  auto mix = [a](double lo, double hi) { return lo + a * (hi - lo); };
  return {{mix(points[i].x, points[i + 1].x), mix(points[i].y, points[i + 1].y)},
          mix(yaw[i], yaw[i + 1]),
          mix(v[i], v[i + 1]),
          mix(omega[i], omega[i + 1])};
}

std::string Trajectory::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < size(); ++i) {
    arr.push_back({{"t", t[i]},
                   {"x", points[i].x},
                   {"y", points[i].y},
                   {"yaw", yaw[i]},
                   {"v", v[i]},
                   {"omega", omega[i]}});
  }
  return arr.dump();
}

Trajectory Trajectory::from_json(const std::string& text) {
  const nlohmann::json arr = nlohmann::json::parse(text);
  Trajectory out;
  for (const auto& row : arr) {
    out.t.push_back(row.at("t").get<double>());
    out.points.push_back({row.at("x").get<double>(), row.at("y").get<double>()});
    out.yaw.push_back(row.at("yaw").get<double>());
    out.v.push_back(row.at("v").get<double>());
    out.omega.push_back(row.at("omega").get<double>());
  }
  return out;
}

Trajectory time_scale(const DensePath& path, const std::vector<double>& bump_vals,
                      const VehicleLimits& limits, const SpeedParams& params, double v_start,
                      double v_end) {
  const std::size_t n_in = path.points.size();
  if (n_in < 2) throw TooFewPoints("time scaling needs at least two samples");
  if (!bump_vals.empty() && bump_vals.size() != n_in) {
    throw ShapeMismatch("one bumpiness value per path sample required");
  }

  // Merge zero-length segments; duplicated points carry no profile information.
  std::vector<std::size_t> keep{0};
  for (std::size_t i = 1; i < n_in; ++i) {
    if (distance(path.points[i], path.points[keep.back()]) > 1e-12) keep.push_back(i);
  }
  const std::size_t n = keep.size();

  Trajectory out;
  if (n < 2) {
    // Fully degenerate path: a single-instant trajectory at the start point.
    out.t = {0.0};
    out.points = {path.points.front()};
    out.yaw = {0.0};
    out.v = {v_start};
    out.omega = {0.0};
    return out;
  }

  std::vector<double> ds(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    ds[i] = distance(path.points[keep[i]], path.points[keep[i + 1]]);
  }

  // Hard per-sample speed caps.
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double kappa = path.curvatures[keep[i]];
    double cap = std::min(limits.v_max,
                          std::sqrt(limits.a_lat_max / (std::abs(kappa) + params.eps_kappa)));
    if (!bump_vals.empty()) {
      const double b = bump_vals[keep[i]];
      cap = std::min(cap, std::sqrt(params.w_time /
                                    (params.w_bump * (pow_int(b, params.alpha) + params.eps_bump))));
    }
    // omega = v*kappa must stay inside its box; shrink v where it would bind.
    if (kappa > 0.0) cap = std::min(cap, limits.omega_max / kappa);
    if (kappa < 0.0) cap = std::min(cap, limits.omega_min / kappa);
    v[i] = cap;
  }

  v[0] = std::min(v[0], v_start);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    v[i + 1] = std::min(v[i + 1], std::sqrt(v[i] * v[i] + 2.0 * limits.a_acc * ds[i]));
  }
  if (v[n - 1] + 1e-9 < v_end) {
    throw InfeasibleBoundary("end speed unreachable under acceleration limits");
  }
  v[n - 1] = std::min(v[n - 1], v_end);
  const double v0_forward = v[0];
  for (std::size_t i = n - 1; i-- > 0;) {
    v[i] = std::min(v[i], std::sqrt(v[i + 1] * v[i + 1] + 2.0 * limits.a_dec * ds[i]));
  }
  // The backward pass cutting the start speed means the vehicle entering at
  // v_start could not brake hard enough for what lies ahead.
  if (v[0] + 1e-9 < v0_forward) {
    throw InfeasibleBoundary("start speed unreachable under braking limits");
  }

  out.t.resize(n);
  out.points.resize(n);
  out.yaw.resize(n);
  out.v = std::move(v);
  out.omega.resize(n);
  out.t[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) out.points[i] = path.points[keep[i]];
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double pair = out.v[i] + out.v[i + 1];
    out.t[i + 1] = out.t[i] + (pair > 1e-12 ? 2.0 * ds[i] / pair : 0.0);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Vec2 d = out.points[i + 1] - out.points[i];
    double raw = std::atan2(d.y, d.x);
    if (i > 0) {
      // unwrap against the previous yaw
      while (raw - out.yaw[i - 1] > M_PI) raw -= 2.0 * M_PI;
      while (raw - out.yaw[i - 1] < -M_PI) raw += 2.0 * M_PI;
    }
    out.yaw[i] = raw;
  }
  out.yaw[n - 1] = out.yaw[n - 2];
  for (std::size_t i = 0; i < n; ++i) {
    out.omega[i] = out.v[i] * path.curvatures[keep[i]];
  }
  return out;
}

}  // namespace trail
