#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "trail/astar.hpp"
#include "trail/costmap.hpp"
#include "trail/field.hpp"
#include "trail/mppi.hpp"
#include "trail/timescale.hpp"
#include "trail/track.hpp"
#include "trail/trajopt.hpp"

namespace trail {

// Planner-side knobs for the full pipeline (costmap -> A* -> optimize ->
// time-scale -> MPC). Speed limits live in VehicleLimits; the copies inside
// SpeedParams are overwritten from there when a scenario is loaded.
struct TrailParams {
  GeomCostParams costmap;
  double inflate_radius = 0.0;
  AStarParams astar;
  int control_points = 30;
  ObjectiveWeights weights;
  SpeedParams speed;
  FootprintSpec footprint;
  OptimizerConfig optimizer;
  MpcWeights mpc;
};

struct SimParams {
  double time_cap = 60.0;
  double dt = 0.05;            // plant step for the TRAIL loop
  double replan_period = 0.5;  // seconds between plan refreshes
  double goal_radius = 0.5;
  int trials = 3;
  std::uint64_t seed = 1;
};

struct ScenarioConfig {
  std::string name;
  Bounds region;
  std::shared_ptr<const TerrainField> elevation;
  std::shared_ptr<const TerrainField> bumpiness;
  UnicycleState start;
  Point2 goal;
  VehicleLimits limits;
  TrailParams trail;
  MppiConfig mppi;
  SimParams sim;

  // Parses the "trail-scenario/1" JSON schema; throws ConfigInvalid on any
  // structural or range problem.
  static ScenarioConfig from_json(const std::string& text);
  static ScenarioConfig from_file(const std::string& path);
};

enum class Method { Trail, MppiGeo, MppiGeoTerm, MppiBump, MppiAStarBump, MppiFused };

const char* method_name(Method m);
Method parse_method(const std::string& name);  // throws ConfigInvalid
std::vector<Method> all_methods();

struct RunMetrics {
  bool success = false;
  double progress = 0.0;
  // Defined only when success is true.
  double time = 0.0;
  double length = 0.0;
  double az_rms_mean = 0.0;
  double az_max = 0.0;
};

// Stable key order and shortest-round-trip doubles, so equal metrics always
// serialize to identical bytes.
std::string metrics_to_json(const RunMetrics& m);

struct TrialResult {
  RunMetrics metrics;
  RolloutLog log;
  CostGrid planning_grid;               // grid the planner ran on
  std::vector<OptimizeTraceRow> trace;  // first optimizer run (TRAIL only)
  std::string note;                     // "no-path-at-start" when planning failed immediately
};

// Closed-loop episode: runs until the goal radius is reached or time_cap
// expires. A planner failure on the very first cycle is reported as a failed
// trial with the note set, not an exception.
TrialResult run_trial(const ScenarioConfig& scenario, Method method, std::uint64_t seed);

struct Stat {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
};

struct SuiteRow {
  std::string scenario;
  std::string method;
  int trials = 0;
  int successes = 0;
  Stat progress;
  // Success-only metrics are absent when no trial succeeded.
  std::optional<Stat> time;
  std::optional<Stat> length;
  std::optional<Stat> az_rms_mean;
  std::optional<Stat> az_max;
};

// trials <= 0 falls back to each scenario's own sim.trials. Per-trial seeds
// are derived from the scenario seed and the trial index.
std::vector<SuiteRow> run_suite(const std::vector<ScenarioConfig>& scenarios,
                                const std::vector<Method>& methods, int trials);

std::string suite_to_csv(const std::vector<SuiteRow>& rows);
std::string suite_to_json(const std::vector<SuiteRow>& rows);

std::uint64_t trial_seed(std::uint64_t scenario_seed, int trial_index);

struct PlotData {
  std::string cost_raster_json;     // planning grid, reloadable as a field
  std::string trajectory_json;      // polyline with per-sample speed and range
  std::string optimizer_trace_csv;  // iteration, objective value, terms
};

// Throws EmptyLog when the trial has no rollout samples.
PlotData export_plot_data(const TrialResult& trial);

}  // namespace trail
