#include "trail/mppi.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "trail/errors.hpp"

namespace trail {

namespace {

// Off-grid rollout states are treated as the worst possible cell.
constexpr double kLethalCost = 1.0;

double grid_cost_nearest(const CostGrid& grid, Point2 p) {
  GridIndex idx;
  if (!grid.world_to_cell(p, &idx)) return kLethalCost;
  return grid.at(idx.row, idx.col);
}

void validate(const MppiConfig& cfg) {
  if (cfg.horizon < 1) throw ConfigInvalid("MPPI horizon must be at least 1");
  if (cfg.samples < 1) throw ConfigInvalid("MPPI sample count must be at least 1");
  if (!(cfg.temperature > 0.0)) throw ConfigInvalid("MPPI temperature must be positive");
  if (!(cfg.sigma_v > 0.0) || !(cfg.sigma_omega > 0.0)) {
    throw ConfigInvalid("MPPI noise std devs must be positive");
  }
}

}  // namespace

double rollout_cost(const std::vector<UnicycleState>& states,
                    const std::vector<ControlInput>& inputs, const CostGrid& grid, Point2 goal,
                    MppiVariant variant, const MppiConfig& cfg,
                    const std::vector<Point2>* init_path) {
  const MppiCostWeights& w = cfg.weights;
  double cost = 0.0;
  for (std::size_t k = 0; k + 1 < states.size(); ++k) {
    const Point2 p{states[k + 1].x, states[k + 1].y};
    cost += w.terrain_cost * grid_cost_nearest(grid, p);
    cost += w.goal_dist * distance(p, goal);
  }
  for (const ControlInput& u : inputs) {
    cost += w.control_effort * (u.v * u.v + u.omega * u.omega);
  }
  const Point2 last{states.back().x, states.back().y};
  const double term_w = variant == MppiVariant::GeoTerm ? 5.0 * w.terminal : w.terminal;
  cost += term_w * distance(last, goal);
  if (variant == MppiVariant::AStarBump && init_path && !init_path->empty()) {
    double dev = 0.0;
    for (std::size_t k = 1; k < states.size(); ++k) {
      const Point2 p{states[k].x, states[k].y};
      double best = squared_norm(p - (*init_path)[0]);
      for (std::size_t j = 1; j < init_path->size(); ++j) {
        best = std::min(best, squared_norm(p - (*init_path)[j]));
      }
      dev += best;
    }
    cost += w.path_deviation * dev / static_cast<double>(states.size() - 1);
  }
  return cost;
}

MppiStepResult mppi_step(const UnicycleState& s0, const std::vector<ControlInput>& nominal,
                         const CostGrid& grid, Point2 goal, MppiVariant variant,
                         const MppiConfig& cfg, std::uint64_t rng_seed,
                         const std::vector<Point2>* init_path, MppiStepDetail* detail) {
  validate(cfg);
  const int n = cfg.horizon;
  const int kk = cfg.samples;
  if (static_cast<int>(nominal.size()) != n) {
    throw ShapeMismatch("MPPI nominal sequence must match the horizon");
  }

  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<std::vector<ControlInput>> samples(kk);
  std::vector<double> costs(kk);
  std::vector<UnicycleState> states(n + 1);
  for (int k = 0; k < kk; ++k) {
    auto& seq = samples[k];
    seq.resize(n);
    for (int i = 0; i < n; ++i) {
      const double v = nominal[i].v + cfg.sigma_v * gauss(rng);
      const double om = nominal[i].omega + cfg.sigma_omega * gauss(rng);
      seq[i] = {std::clamp(v, cfg.limits.v_min, cfg.limits.v_max),
                std::clamp(om, cfg.limits.omega_min, cfg.limits.omega_max)};
    }
    states[0] = s0;
    for (int i = 0; i < n; ++i) states[i + 1] = step_dynamics(states[i], seq[i], cfg.dt);
    costs[k] = rollout_cost(states, seq, grid, goal, variant, cfg, init_path);
  }

  const double c_min = *std::min_element(costs.begin(), costs.end());
  std::vector<double> weights(kk);
  double z = 0.0;
  for (int k = 0; k < kk; ++k) {
    weights[k] = std::exp(-(costs[k] - c_min) / cfg.temperature);
    z += weights[k];
  }
  for (double& w : weights) w /= z;

  MppiStepResult out;
  out.sequence.assign(n, {0.0, 0.0});
  for (int k = 0; k < kk; ++k) {
    for (int i = 0; i < n; ++i) {
      out.sequence[i].v += weights[k] * samples[k][i].v;
      out.sequence[i].omega += weights[k] * samples[k][i].omega;
    }
  }
  out.input = out.sequence.front();
  out.nominal.assign(out.sequence.begin() + 1, out.sequence.end());
  out.nominal.push_back(out.sequence.back());

  if (detail) {
    detail->samples = std::move(samples);
    detail->costs = std::move(costs);
    detail->weights = std::move(weights);
  }
  return out;
}

}  // namespace trail
