#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "trail/field.hpp"
#include "trail/geometry.hpp"
#include "trail/timescale.hpp"

namespace trail {

struct UnicycleState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

struct ControlInput {
  double v = 0.0;
  double omega = 0.0;
};

struct MpcWeights {
  std::array<double, 3> q{20.0, 20.0, 4.0};     // state error weights
  std::array<double, 2> r{0.5, 0.25};           // input error weights
  std::array<double, 3> q_n{40.0, 40.0, 8.0};   // terminal state weights
  int horizon = 20;
  double dt = 0.05;
  // Solver knobs (projected Adam over the input sequence).
  int iterations = 160;
  double learning_rate = 0.08;
};

// x_{k+1} = x_k + dt * [cos(theta_k) v_k, sin(theta_k) v_k, omega_k].
UnicycleState step_dynamics(const UnicycleState& s, const ControlInput& u, double dt);

struct MpcSolution {
  ControlInput input;                   // first input of the horizon
  std::vector<ControlInput> sequence;   // full horizon
  double cost = 0.0;
};

// Direct single-shooting: Adam over the flattened input sequence with box
// projection onto the vehicle limits. The clamped reference inputs (and the
// warm start, when given) seed the search, and the best candidate evaluated
// anywhere along the way is returned, so the result never costs more than the
// clamped reference.
MpcSolution mpc_solve(const UnicycleState& s0, const std::vector<UnicycleState>& x_ref,
                      const std::vector<ControlInput>& u_ref, const MpcWeights& weights,
                      const VehicleLimits& limits,
                      const std::vector<ControlInput>* warm_start = nullptr);

struct RolloutLog {
  std::vector<double> t;
  std::vector<double> x, y, theta;
  std::vector<double> v, omega;          // applied inputs
  std::vector<double> v_cmd, omega_cmd;  // raw controller outputs
  std::vector<double> bump;              // bumpiness at the state
  std::vector<double> az;                // vertical-acceleration proxy bump*v

  std::size_t size() const { return t.size(); }
  bool empty() const { return t.empty(); }
  std::string to_csv() const;
};

using ControlLaw = std::function<ControlInput(double t, const UnicycleState&)>;

// Steps the unicycle plant at fixed dt from the trajectory start pose,
// clamping commands into the limits and logging the az proxy bump(p)*v.
RolloutLog simulate(const TerrainField& bump_field, const Trajectory& traj,
                    const ControlLaw& controller, double duration, double dt,
                    const VehicleLimits& limits);

// MPC tracking controller bound to a time-parameterized reference.
class TrajectoryTracker {
 public:
  TrajectoryTracker(Trajectory traj, MpcWeights weights, VehicleLimits limits)
      : traj_(std::move(traj)), weights_(weights), limits_(limits) {}

  ControlInput operator()(double t, const UnicycleState& s);

  void reset(Trajectory traj) {
    traj_ = std::move(traj);
    warm_.clear();
  }
  const Trajectory& trajectory() const { return traj_; }

 private:
  Trajectory traj_;
  MpcWeights weights_;
  VehicleLimits limits_;
  std::vector<ControlInput> warm_;
};

}  // namespace trail
