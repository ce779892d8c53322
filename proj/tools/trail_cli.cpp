// Command-line front end: run single scenarios, aggregate suites, check the
// objective gradient against finite differences, and time the hot stages.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "trail/astar.hpp"
#include "trail/costmap.hpp"
#include "trail/errors.hpp"
#include "trail/field.hpp"
#include "trail/harness.hpp"
#include "trail/track.hpp"
#include "trail/trajopt.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int cmd_run(const std::string& scenario_path, const std::string& method_name, int trials,
            std::int64_t seed, const std::string& out_dir) {
  trail::ScenarioConfig sc = trail::ScenarioConfig::from_file(scenario_path);
  const trail::Method method = trail::parse_method(method_name);
  if (trials > 0) sc.sim.trials = trials;
  if (seed >= 0) sc.sim.seed = static_cast<std::uint64_t>(seed);

  fs::create_directories(out_dir);
  json trials_json = json::array();
  std::ostringstream csv;
  csv.precision(17);
  csv << "trial,success,progress,time,length,az_rms_mean,az_max\n";

  bool no_path = false;
  for (int i = 0; i < sc.sim.trials; ++i) {
    const trail::TrialResult tr =
        trail::run_trial(sc, method, trail::trial_seed(sc.sim.seed, i));
    if (tr.note == "no-path-at-start") no_path = true;

    trials_json.push_back(json::parse(trail::metrics_to_json(tr.metrics)));
    const trail::RunMetrics& m = tr.metrics;
    csv << i << ',' << (m.success ? 1 : 0) << ',' << m.progress << ',';
    if (m.success) {
      csv << m.time << ',' << m.length << ',' << m.az_rms_mean << ',' << m.az_max;
    } else {
      csv << ",,,";
    }
    csv << '\n';
    write_file(fs::path(out_dir) / ("trial_" + std::to_string(i) + "_rollout.csv"),
               tr.log.to_csv());

    if (i == 0 && !tr.log.empty()) {
      const trail::PlotData plot = trail::export_plot_data(tr);
      write_file(fs::path(out_dir) / "plot_cost_raster.json", plot.cost_raster_json);
      write_file(fs::path(out_dir) / "plot_trajectory.json", plot.trajectory_json);
      write_file(fs::path(out_dir) / "plot_optimizer_trace.csv", plot.optimizer_trace_csv);
    }
  }

  json summary;
  summary["scenario"] = sc.name;
  summary["method"] = method_name;
  summary["seed"] = sc.sim.seed;
  summary["trials"] = trials_json;
  write_file(fs::path(out_dir) / "metrics.json", summary.dump(2) + "\n");
  write_file(fs::path(out_dir) / "metrics.csv", csv.str());

  std::cout << summary.dump(2) << std::endl;
  if (no_path) {
    std::cerr << "planner found no path from the start pose" << std::endl;
    return 3;
  }
  return 0;
}

int cmd_suite(const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in) throw trail::ConfigInvalid("cannot open suite config: " + config_path);
  json cfg = json::parse(in, nullptr, true, true);

  const fs::path base = fs::path(config_path).parent_path();
  std::vector<trail::ScenarioConfig> scenarios;
  for (const auto& entry : cfg.at("scenarios")) {
    fs::path p = entry.get<std::string>();
    if (p.is_relative()) p = base / p;
    scenarios.push_back(trail::ScenarioConfig::from_file(p.string()));
  }
  std::vector<trail::Method> methods;
  if (cfg.contains("methods")) {
    for (const auto& m : cfg["methods"]) methods.push_back(trail::parse_method(m));
  } else {
    methods = trail::all_methods();
  }
  const int trials = cfg.value("trials", 0);
  const std::string out_dir = cfg.value("out", "suite_out");

  const auto rows = trail::run_suite(scenarios, methods, trials);
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "suite.csv", trail::suite_to_csv(rows));
  write_file(fs::path(out_dir) / "suite.json", trail::suite_to_json(rows) + "\n");
  std::cout << trail::suite_to_csv(rows);
  return 0;
}

// Random smooth planning problems for the finite-difference comparison.
struct GradCheckCase {
  std::shared_ptr<trail::AnalyticField> field;
  trail::ControlPolygon ctrl;
};

GradCheckCase make_case(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(0.2, 0.6);
  std::uniform_real_distribution<double> sig(0.8, 1.6);
  std::uniform_real_distribution<double> off(-0.8, 0.8);
  std::uniform_real_distribution<double> cx(1.0, 9.0);

  const trail::Bounds region{-2.0, 12.0, -5.0, 5.0};
  GradCheckCase out;
  out.field = std::make_shared<trail::AnalyticField>(region);
  out.field->add_constant(0.2);
  for (int i = 0; i < 4; ++i) {
    out.field->add_bump({{cx(rng), off(rng) * 3.0}, amp(rng), sig(rng)});
  }
  const int m = 8;
  for (int i = 0; i < m; ++i) {
    const double x = 10.0 * i / (m - 1);
    out.ctrl.points.push_back({x, off(rng)});
  }
  return out;
}

double gradcheck_max_rel_error(int cases, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const trail::ObjectiveWeights weights{1.0, 1.0, 0.1};
  const trail::SpeedParams speed;
  const trail::FootprintSpec fp;
  const int n_dense = 48;
  const double h = 1e-5;

  double worst = 0.0;
  for (int c = 0; c < cases; ++c) {
    GradCheckCase gc = make_case(rng);
    const trail::ObjectiveResult res =
        trail::objective(gc.ctrl, *gc.field, weights, speed, fp, n_dense);

    double fd_scale = 1.0;
    std::vector<trail::Vec2> fd(res.gradient.size());
    for (std::size_t i = 1; i + 1 < gc.ctrl.points.size(); ++i) {
      for (int axis = 0; axis < 2; ++axis) {
        trail::ControlPolygon plus = gc.ctrl;
        trail::ControlPolygon minus = gc.ctrl;
        double& pv = axis == 0 ? plus.points[i].x : plus.points[i].y;
        double& mv = axis == 0 ? minus.points[i].x : minus.points[i].y;
        pv += h;
        mv -= h;
        const double jp = trail::objective_value(plus, *gc.field, weights, speed, fp, n_dense);
        const double jm = trail::objective_value(minus, *gc.field, weights, speed, fp, n_dense);
        const double d = (jp - jm) / (2.0 * h);
        (axis == 0 ? fd[i - 1].x : fd[i - 1].y) = d;
        fd_scale = std::max(fd_scale, std::abs(d));
      }
    }
    for (std::size_t i = 0; i < fd.size(); ++i) {
      worst = std::max(worst, std::abs(res.gradient[i].x - fd[i].x) / fd_scale);
      worst = std::max(worst, std::abs(res.gradient[i].y - fd[i].y) / fd_scale);
    }
  }
  return worst;
}

int cmd_gradcheck(int cases, std::uint64_t seed) {
  const double worst = gradcheck_max_rel_error(cases, seed);
  std::cout << "objective gradient vs central differences (" << cases
            << " cases): max relative error " << worst << std::endl;
  return worst < 1e-4 ? 0 : 1;
}

template <class F>
double time_ms(F&& body, int repeats) {
  using clock = std::chrono::steady_clock;
  double best = 1e300;
  for (int i = 0; i < repeats; ++i) {
    const auto t0 = clock::now();
    body();
    const auto t1 = clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

int cmd_bench() {
  // Stage 1: objective value + gradient, 30-point polygon, 64 dense samples.
  const trail::Bounds region{-2.0, 32.0, -8.0, 8.0};
  auto field = std::make_shared<trail::AnalyticField>(region);
  field->add_constant(0.2);
  for (int i = 0; i < 5; ++i) {
    field->add_bump({{3.0 + 5.0 * i, (i % 2 == 0) ? 1.5 : -1.5}, 0.5, 1.0});
  }
  trail::ControlPolygon ctrl;
  for (int i = 0; i < 30; ++i) {
    ctrl.points.push_back({30.0 * i / 29.0, 0.3 * std::sin(0.5 * i)});
  }
  const trail::ObjectiveWeights weights;
  const trail::SpeedParams speed;
  const trail::FootprintSpec fp;
  volatile double sink = 0.0;
  const double obj_ms = time_ms(
      [&] {
        const auto r = trail::objective(ctrl, *field, weights, speed, fp, 64);
        sink = r.value + r.gradient[0].x;
      },
      20);

  // Stage 2: A* across a 100x100 grid with scattered soft obstacles.
  trail::CostGrid grid;
  grid.origin = {0.0, 0.0};
  grid.resolution = 0.25;
  grid.rows = 100;
  grid.cols = 100;
  grid.cost.assign(10000, 0.1);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> cell(10, 89);
  for (int i = 0; i < 60; ++i) {
    const int r = cell(rng);
    const int c = cell(rng);
    for (int dr = -2; dr <= 2; ++dr) {
      for (int dc = -2; dc <= 2; ++dc) {
        grid.at(r + dr, c + dc) = 0.9;
      }
    }
  }
  const double astar_ms = time_ms(
      [&] {
        const auto path = trail::plan(grid, {0.3, 0.3}, {24.7, 24.7});
        sink = path.cost;
      },
      20);

  // Stage 3: one MPC solve, horizon 20.
  const trail::MpcWeights mw;
  const trail::VehicleLimits limits;
  std::vector<trail::UnicycleState> x_ref(mw.horizon + 1);
  std::vector<trail::ControlInput> u_ref(mw.horizon, {1.0, 0.0});
  for (int k = 0; k <= mw.horizon; ++k) x_ref[k] = {1.0 * mw.dt * k, 0.0, 0.0};
  const trail::UnicycleState s0{0.0, 0.4, 0.1};
  const double mpc_ms = time_ms(
      [&] {
        const auto sol = trail::mpc_solve(s0, x_ref, u_ref, mw, limits);
        sink = sol.cost;
      },
      10);
  (void)sink;

  std::cout << "objective+gradient (30 ctrl pts, 64 dense, 3x3 footprint): " << obj_ms
            << " ms (budget 20)\n"
            << "A* 100x100: " << astar_ms << " ms (budget 20)\n"
            << "MPC solve N=20: " << mpc_ms << " ms (budget 50)" << std::endl;
  const bool ok = obj_ms <= 20.0 && astar_ms <= 20.0 && mpc_ms <= 50.0;
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"terrain-aware planning pipeline"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string method = "trail";
  int trials = 0;
  std::int64_t seed = -1;
  std::string out_dir = "out";
  CLI::App* run = app.add_subcommand("run", "run one scenario with one method");
  run->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--method", method,
                  "trail|mppi-geo|mppi-geo-term|mppi-bump|mppi-astar-bump|mppi-fused");
  run->add_option("--trials", trials, "override scenario trial count");
  run->add_option("--seed", seed, "override scenario seed");
  run->add_option("--out", out_dir, "output directory");

  std::string suite_config;
  CLI::App* suite = app.add_subcommand("suite", "run a scenario x method grid");
  suite->add_option("--config", suite_config, "suite config JSON")->required();

  int gc_cases = 10;
  std::uint64_t gc_seed = 20240901;
  CLI::App* gradcheck = app.add_subcommand("gradcheck", "objective gradient vs finite differences");
  gradcheck->add_option("--cases", gc_cases, "number of random configurations");
  gradcheck->add_option("--seed", gc_seed, "rng seed");

  CLI::App* bench = app.add_subcommand("bench", "per-stage timing report");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(scenario_path, method, trials, seed, out_dir);
    if (suite->parsed()) return cmd_suite(suite_config);
    if (gradcheck->parsed()) return cmd_gradcheck(gc_cases, gc_seed);
    if (bench->parsed()) return cmd_bench();
  } catch (const trail::ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
