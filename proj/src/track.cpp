#include "trail/track.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "trail/autodiff.hpp"
#include "trail/errors.hpp"

namespace trail {

UnicycleState step_dynamics(const UnicycleState& s, const ControlInput& u, double dt) {
  return {s.x + dt * std::cos(s.theta) * u.v, s.y + dt * std::sin(s.theta) * u.v,
          s.theta + dt * u.omega};
}

namespace {

ControlInput clamp_input(ControlInput u, const VehicleLimits& lim) {
  return {std::clamp(u.v, lim.v_min, lim.v_max), std::clamp(u.omega, lim.omega_min, lim.omega_max)};
}

// Horizon cost with the rollout inlined so it works for doubles and tape vars.
template <class S>
S horizon_cost(const UnicycleState& s0, const std::vector<S>& u_flat,
               const std::vector<UnicycleState>& x_ref, const std::vector<ControlInput>& u_ref,
               const MpcWeights& w) {
  using std::cos;
  using std::sin;
  using ad::cos;
  using ad::sin;
  const int n = w.horizon;
  S cost(0.0);
  S x(s0.x), y(s0.y), th(s0.theta);
  for (int k = 0; k < n; ++k) {
    const S ex = x - x_ref[k].x;
    const S ey = y - x_ref[k].y;
    // wrapped yaw error; the wrap offset is constant within the evaluation
    const double wrap = std::round((value_of(th) - x_ref[k].theta) / (2.0 * M_PI)) * 2.0 * M_PI;
    const S eth = th - (x_ref[k].theta + wrap);
    const S ev = u_flat[2 * k] - u_ref[k].v;
    const S ew = u_flat[2 * k + 1] - u_ref[k].omega;
    cost += w.q[0] * ex * ex + w.q[1] * ey * ey + w.q[2] * eth * eth;
    cost += w.r[0] * ev * ev + w.r[1] * ew * ew;
    const S v = u_flat[2 * k];
    const S om = u_flat[2 * k + 1];
    x = x + w.dt * cos(th) * v;
    y = y + w.dt * sin(th) * v;
    th = th + w.dt * om;
  }
  const S ex = x - x_ref[n].x;
  const S ey = y - x_ref[n].y;
  const double wrap = std::round((value_of(th) - x_ref[n].theta) / (2.0 * M_PI)) * 2.0 * M_PI;
  const S eth = th - (x_ref[n].theta + wrap);
  cost += w.q_n[0] * ex * ex + w.q_n[1] * ey * ey + w.q_n[2] * eth * eth;
  return cost;
}

}  // namespace

MpcSolution mpc_solve(const UnicycleState& s0, const std::vector<UnicycleState>& x_ref,
                      const std::vector<ControlInput>& u_ref, const MpcWeights& weights,
                      const VehicleLimits& limits, const std::vector<ControlInput>* warm_start) {
  const int n = weights.horizon;
  if (static_cast<int>(u_ref.size()) != n || static_cast<int>(x_ref.size()) != n + 1) {
    throw ShapeMismatch("MPC references must span the horizon (N inputs, N+1 states)");
  }

  auto flatten = [&](const std::vector<ControlInput>& seq) {
    std::vector<double> out(2 * n);
    for (int k = 0; k < n; ++k) {
      const ControlInput c = clamp_input(seq[k], limits);
      out[2 * k] = c.v;
      out[2 * k + 1] = c.omega;
    }
    return out;
  };

  auto cost_of = [&](const std::vector<double>& u_flat) {
    return horizon_cost<double>(s0, u_flat, x_ref, u_ref, weights);
  };

  // Candidate seeds: the clamped reference and, if present, the warm start.
  std::vector<double> theta = flatten(u_ref);
  double best_cost = cost_of(theta);
  std::vector<double> best = theta;
  if (warm_start && static_cast<int>(warm_start->size()) == n) {
    std::vector<double> w = flatten(*warm_start);
    const double c = cost_of(w);
    if (c < best_cost) {
      best_cost = c;
      best = w;
      theta = std::move(w);
    }
  }

  const int dim = 2 * n;
  std::vector<double> m1(dim, 0.0), m2(dim, 0.0);
  ad::Tape tape;
  for (int iter = 1; iter <= weights.iterations; ++iter) {
    tape = ad::Tape();
    tape.reserve(4096);
    std::vector<ad::Var> u(dim);
    for (int i = 0; i < dim; ++i) u[i] = tape.input(theta[i]);
    const ad::Var c = horizon_cost<ad::Var>(s0, u, x_ref, u_ref, weights);
    if (c.value() < best_cost) {
      best_cost = c.value();
      best = theta;
    }
    const auto adj = tape.gradient(c);
    const double bc1 = 1.0 - std::pow(0.9, iter);
    const double bc2 = 1.0 - std::pow(0.999, iter);
    for (int i = 0; i < dim; ++i) {
      const double g = ad::Tape::adjoint(adj, u[i]);
      m1[i] = 0.9 * m1[i] + 0.1 * g;
      m2[i] = 0.999 * m2[i] + 0.001 * g * g;
      theta[i] -= weights.learning_rate * (m1[i] / bc1) / (std::sqrt(m2[i] / bc2) + 1e-8);
    }
    for (int k = 0; k < n; ++k) {
      theta[2 * k] = std::clamp(theta[2 * k], limits.v_min, limits.v_max);
      theta[2 * k + 1] = std::clamp(theta[2 * k + 1], limits.omega_min, limits.omega_max);
    }
  }
  const double final_cost = cost_of(theta);
  if (final_cost < best_cost) {
    best_cost = final_cost;
    best = theta;
  }

  MpcSolution sol;
  sol.cost = best_cost;
  sol.sequence.resize(n);
  for (int k = 0; k < n; ++k) sol.sequence[k] = {best[2 * k], best[2 * k + 1]};
  sol.input = sol.sequence.front();
  return sol;
}

std::string RolloutLog::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "t,x,y,theta,v,omega,v_cmd,omega_cmd,bump,az_proxy\n";
  for (std::size_t i = 0; i < size(); ++i) {
    os << t[i] << ',' << x[i] << ',' << y[i] << ',' << theta[i] << ',' << v[i] << ',' << omega[i]
       << ',' << v_cmd[i] << ',' << omega_cmd[i] << ',' << bump[i] << ',' << az[i] << '\n';
  }
  return os.str();
}

RolloutLog simulate(const TerrainField& bump_field, const Trajectory& traj,
                    const ControlLaw& controller, double duration, double dt,
                    const VehicleLimits& limits) {
  RolloutLog log;
  if (traj.empty() || duration <= 0.0) return log;
  const TrajectorySample start = traj.sample_at(0.0);
  UnicycleState s{start.point.x, start.point.y, start.yaw};
  const int steps = static_cast<int>(std::ceil(duration / dt - 1e-9));
  for (int k = 0; k < steps; ++k) {
    const double t = k * dt;
    const ControlInput cmd = controller(t, s);
    const ControlInput applied = clamp_input(cmd, limits);
    const double b = bump_field.query({s.x, s.y}).value;
    log.t.push_back(t);
    log.x.push_back(s.x);
    log.y.push_back(s.y);
    log.theta.push_back(wrap_angle(s.theta));
    log.v.push_back(applied.v);
    log.omega.push_back(applied.omega);
    log.v_cmd.push_back(cmd.v);
    log.omega_cmd.push_back(cmd.omega);
    log.bump.push_back(b);
    log.az.push_back(b * applied.v);
    s = step_dynamics(s, applied, dt);
  }
  return log;
}

ControlInput TrajectoryTracker::operator()(double t, const UnicycleState& s) {
  const int n = weights_.horizon;
  std::vector<UnicycleState> x_ref(n + 1);
  std::vector<ControlInput> u_ref(n);
  for (int k = 0; k <= n; ++k) {
    const TrajectorySample r = traj_.sample_at(t + k * weights_.dt);
    x_ref[k] = {r.point.x, r.point.y, r.yaw};
    if (k < n) u_ref[k] = {r.v, r.omega};
  }
  const MpcSolution sol =
      mpc_solve(s, x_ref, u_ref, weights_, limits_, warm_.empty() ? nullptr : &warm_);
  // shift-by-one warm start for the next solve
  warm_ = sol.sequence;
  if (!warm_.empty()) {
    warm_.erase(warm_.begin());
    warm_.push_back(warm_.back());
  }
  return sol.input;
}

}  // namespace trail
