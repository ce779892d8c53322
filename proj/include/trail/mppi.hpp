#pragma once

#include <cstdint>
#include <vector>

#include "trail/costmap.hpp"
#include "trail/geometry.hpp"
#include "trail/timescale.hpp"
#include "trail/track.hpp"

namespace trail {

struct MppiCostWeights {
  double goal_dist = 1.0;        // running distance to goal
  double terrain_cost = 4.0;     // running grid cost at each state
  double control_effort = 0.01;  // ||u||^2 per step
  double terminal = 10.0;        // final goal distance
  double path_deviation = 2.0;   // mean squared offset from a reference path
};

struct MppiConfig {
  int horizon = 20;
  double dt = 0.1;
  int samples = 1024;
  double temperature = 1.0;
  double sigma_v = 0.6;       // input noise std dev on v
  double sigma_omega = 0.8;   // input noise std dev on omega
  MppiCostWeights weights;
  VehicleLimits limits;
};

// Which ablation cost the rollout uses. The grid itself is the caller's
// choice (geometric, bumpiness, or a blend); the variant only toggles the
// terminal multiplier and the path-deviation term.
enum class MppiVariant { Geo, GeoTerm, Bump, AStarBump, Fused };

// Cost of one rollout: running terrain cost (nearest-cell lookup, off-grid
// states count as lethal), running goal distance, control effort, terminal
// goal distance (5x weight for GeoTerm), and for AStarBump the mean squared
// distance to the nearest point of `init_path`.
double rollout_cost(const std::vector<UnicycleState>& states,
                    const std::vector<ControlInput>& inputs, const CostGrid& grid, Point2 goal,
                    MppiVariant variant, const MppiConfig& cfg,
                    const std::vector<Point2>* init_path = nullptr);

// Per-step internals, exposed so tests can replay the exact sample set.
struct MppiStepDetail {
  std::vector<std::vector<ControlInput>> samples;  // K clamped input sequences
  std::vector<double> costs;                       // K rollout costs
  std::vector<double> weights;                     // K softmax weights, sum 1
};

struct MppiStepResult {
  ControlInput input;                   // first input of the averaged sequence
  std::vector<ControlInput> sequence;   // softmax-weighted average, length N
  std::vector<ControlInput> nominal;    // sequence shifted by one for the next step
};

// One information-theoretic MPPI update: sample K Gaussian perturbations of
// the nominal sequence (clamped to the input box), roll out the unicycle,
// weight by exp(-(c - min c)/lambda), and average. Deterministic for a fixed
// seed; the reduction runs in fixed sample order.
MppiStepResult mppi_step(const UnicycleState& s0, const std::vector<ControlInput>& nominal,
                         const CostGrid& grid, Point2 goal, MppiVariant variant,
                         const MppiConfig& cfg, std::uint64_t rng_seed,
                         const std::vector<Point2>* init_path = nullptr,
                         MppiStepDetail* detail = nullptr);

}  // namespace trail
