#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"

#include "trail/costmap.hpp"
#include "trail/harness.hpp"

using namespace trail;

namespace {

std::string scenario_path(const char* name) {
  return std::string(TRAIL_SCENARIO_DIR) + "/" + name;
}

// Smallest scenario that parses; tests mutate copies of this.
const char* kMinimalScenario = R"({
  "schema": "trail-scenario/1",
  "name": "unit",
  "region": {"x_min": -2, "x_max": 12, "y_min": -4, "y_max": 4},
  "bumpiness": {"base": 0.1},
  "start": {"x": 0, "y": 0},
  "goal": {"x": 10, "y": 0},
  "sim": {"trials": 1, "time_cap": 30}
})";

}  // namespace

TEST_CASE("metrics JSON uses a stable schema for success and failure") {
  RunMetrics ok;
  ok.success = true;
  ok.progress = 1.0;
  ok.time = 7.5;
  ok.length = 19.5;
  ok.az_rms_mean = 0.2;
  ok.az_max = 0.4;
  CHECK(metrics_to_json(ok) ==
        "{\"az_max\":0.4,\"az_rms_mean\":0.2,\"length\":19.5,"
        "\"progress\":1.0,\"success\":true,\"time\":7.5}");

  RunMetrics fail;
  fail.success = false;
  fail.progress = 0.25;
  CHECK(metrics_to_json(fail) == "{\"progress\":0.25,\"success\":false}");
}

TEST_CASE("method names round trip and unknown names are rejected") {
  for (Method m : all_methods()) {
    CHECK(parse_method(method_name(m)) == m);
  }
  CHECK(std::string(method_name(Method::Trail)) == "trail");
  CHECK(std::string(method_name(Method::MppiGeoTerm)) == "mppi-geo-term");
  CHECK_THROWS_AS(parse_method("dijkstra"), ConfigInvalid);
}

TEST_CASE("scenario parsing validates structure and ranges") {
  CHECK_NOTHROW(ScenarioConfig::from_json(kMinimalScenario));
  CHECK_THROWS_AS(ScenarioConfig::from_json("not json at all"), ConfigInvalid);
  CHECK_THROWS_AS(ScenarioConfig::from_json("{\"schema\": \"other/9\"}"), ConfigInvalid);

  auto broken = [&](const std::string& needle, const std::string& replacement) {
    std::string text = kMinimalScenario;
    const auto pos = text.find(needle);
    REQUIRE(pos != std::string::npos);
    text.replace(pos, needle.size(), replacement);
    return text;
  };

  // region must exist, be numeric and have positive extent
  CHECK_THROWS_AS(ScenarioConfig::from_json(broken("\"x_max\": 12", "\"x_max\": -2")),
                  ConfigInvalid);
  CHECK_THROWS_AS(ScenarioConfig::from_json(broken("\"x_max\": 12", "\"x_max\": \"wide\"")),
                  ConfigInvalid);
  // endpoints must be inside the region
  CHECK_THROWS_AS(ScenarioConfig::from_json(broken("\"goal\": {\"x\": 10, \"y\": 0}",
                                                   "\"goal\": {\"x\": 40, \"y\": 0}")),
                  ConfigInvalid);
  CHECK_THROWS_AS(ScenarioConfig::from_json(broken("\"start\": {\"x\": 0, \"y\": 0}",
                                                   "\"start\": {\"x\": 0, \"y\": 9}")),
                  ConfigInvalid);

  // primitive parameter ranges
  CHECK_THROWS_AS(
      ScenarioConfig::from_json(broken(
          "\"bumpiness\": {\"base\": 0.1}",
          "\"bumpiness\": {\"primitives\": [{\"type\": \"gaussian_bump\", \"x\": 1, \"y\": 0, "
          "\"amplitude\": 0.5, \"sigma\": 0}]}")),
      ConfigInvalid);
  CHECK_THROWS_AS(
      ScenarioConfig::from_json(broken("\"bumpiness\": {\"base\": 0.1}",
                                       "\"bumpiness\": {\"primitives\": [{\"type\": \"vortex\"}]}")),
      ConfigInvalid);

  // nested section validation
  CHECK_THROWS_AS(ScenarioConfig::from_json(broken("\"sim\": {\"trials\": 1, \"time_cap\": 30}",
                                                   "\"sim\": {\"trials\": 0}")),
                  ConfigInvalid);
  CHECK_THROWS_AS(ScenarioConfig::from_json(broken("\"sim\": {\"trials\": 1, \"time_cap\": 30}",
                                                   "\"limits\": {\"v_min\": 2, \"v_max\": 1}")),
                  ConfigInvalid);
  CHECK_THROWS_AS(ScenarioConfig::from_json(broken("\"sim\": {\"trials\": 1, \"time_cap\": 30}",
                                                   "\"mppi\": {\"sigma\": [0.5]}")),
                  ConfigInvalid);
  CHECK_THROWS_AS(ScenarioConfig::from_json(broken("\"sim\": {\"trials\": 1, \"time_cap\": 30}",
                                                   "\"trail\": {\"control_points\": 1}")),
                  ConfigInvalid);

  CHECK_THROWS_AS(ScenarioConfig::from_file("/nonexistent/path.json"), ConfigInvalid);
}

TEST_CASE("parsed scenarios mirror the vehicle caps into the speed model") {
  std::string text = kMinimalScenario;
  const std::string needle = "\"sim\": {\"trials\": 1, \"time_cap\": 30}";
  text.replace(text.find(needle), needle.size(),
               "\"limits\": {\"v_max\": 2.5, \"a_lat_max\": 1.5}");
  const ScenarioConfig sc = ScenarioConfig::from_json(text);
  CHECK(sc.limits.v_max == 2.5);
  CHECK(sc.trail.speed.v_max == 2.5);
  CHECK(sc.trail.speed.a_lat_max == 1.5);
}

TEST_CASE("raster primitives add interpolated samples onto the base") {
  std::string values = "0.5";
  for (int i = 1; i < 4 * 7; ++i) values += ",0.5";
  std::string text = kMinimalScenario;
  const std::string needle = "\"bumpiness\": {\"base\": 0.1}";
  text.replace(text.find(needle), needle.size(),
               "\"bumpiness\": {\"base\": 0.1, \"primitives\": [{\"type\": \"raster\","
               "\"origin_x\": -2, \"origin_y\": -4, \"resolution\": 2.0, \"rows\": 4,"
               "\"cols\": 7, \"values\": [" + values + "]}]}");
  const ScenarioConfig sc = ScenarioConfig::from_json(text);
  // Interpolating constant samples reproduces the constant anywhere inside.
  CHECK(sc.bumpiness->query({5.0, 0.0}).value == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("per-trial seeds are distinct and reproducible") {
  CHECK(trial_seed(7, 0) == trial_seed(7, 0));
  CHECK(trial_seed(7, 0) != trial_seed(7, 1));
  CHECK(trial_seed(7, 1) != trial_seed(7, 2));
  CHECK(trial_seed(7, 0) != trial_seed(8, 0));
}

TEST_CASE("a trial that starts on the goal succeeds instantly") {
  std::string text = kMinimalScenario;
  const std::string needle = "\"goal\": {\"x\": 10, \"y\": 0}";
  text.replace(text.find(needle), needle.size(), "\"goal\": {\"x\": 0, \"y\": 0}");
  const ScenarioConfig sc = ScenarioConfig::from_json(text);
  const TrialResult tr = run_trial(sc, Method::Trail, 1);
  CHECK(tr.metrics.success);
  CHECK(tr.metrics.progress == 1.0);
  CHECK(tr.metrics.time == 0.0);
  CHECK(tr.metrics.length == 0.0);
  CHECK(tr.log.empty());
}

TEST_CASE("the pipeline drives the flat scenario near-straight to the goal") {
  const ScenarioConfig sc = ScenarioConfig::from_file(scenario_path("flat.json"));
  const TrialResult tr = run_trial(sc, Method::Trail, trial_seed(sc.sim.seed, 0));
  REQUIRE(tr.metrics.success);
  CHECK(tr.metrics.progress == 1.0);
  // Straight-line distance is 20 m and the episode ends at the goal radius.
  CHECK(tr.metrics.length > 18.5);
  CHECK(tr.metrics.length < 21.0);
  CHECK(tr.metrics.time > 0.0);
  CHECK_FALSE(tr.log.empty());
  CHECK(tr.trace.size() > 0);  // first optimizer run is traced

  // Deterministic replay, down to the serialized bytes.
  const TrialResult again = run_trial(sc, Method::Trail, trial_seed(sc.sim.seed, 0));
  CHECK(metrics_to_json(tr.metrics) == metrics_to_json(again.metrics));
  CHECK(tr.log.size() == again.log.size());
}

TEST_CASE("sampling controllers replay bit-identically under a fixed seed") {
  const ScenarioConfig sc = ScenarioConfig::from_file(scenario_path("flat.json"));
  const TrialResult a = run_trial(sc, Method::MppiGeo, 42);
  const TrialResult b = run_trial(sc, Method::MppiGeo, 42);
  CHECK(metrics_to_json(a.metrics) == metrics_to_json(b.metrics));
  REQUIRE(a.log.size() == b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    CHECK(a.log.x[i] == b.log.x[i]);
    CHECK(a.log.y[i] == b.log.y[i]);
  }
}

TEST_CASE("a walled-off goal fails gracefully with a note") {
  const ScenarioConfig sc = ScenarioConfig::from_file(scenario_path("blocked.json"));
  const TrialResult tr = run_trial(sc, Method::Trail, 1);
  CHECK_FALSE(tr.metrics.success);
  CHECK(tr.metrics.progress == 0.0);
  CHECK(tr.note == "no-path-at-start");
  CHECK(tr.log.empty());
  CHECK_THROWS_AS(export_plot_data(tr), EmptyLog);

  // The init-path variant hits the same wall before sampling anything.
  const TrialResult mp = run_trial(sc, Method::MppiAStarBump, 1);
  CHECK_FALSE(mp.metrics.success);
  CHECK(mp.note == "no-path-at-start");
}

TEST_CASE("suite rows aggregate per-trial metrics with population stats") {
  const ScenarioConfig sc = ScenarioConfig::from_file(scenario_path("flat.json"));
  const std::vector<SuiteRow> rows = run_suite({sc}, {Method::Trail, Method::MppiGeo}, 2);
  REQUIRE(rows.size() == 2);

  const SuiteRow& trail_row = rows[0];
  CHECK(trail_row.scenario == sc.name);
  CHECK(trail_row.method == "trail");
  CHECK(trail_row.trials == 2);
  CHECK(trail_row.successes == 2);
  CHECK(trail_row.progress.mean == 1.0);
  CHECK(trail_row.progress.stddev == 0.0);
  REQUIRE(trail_row.time.has_value());
  // The planner ignores the seed, so both trials are identical.
  CHECK(trail_row.time->stddev == 0.0);
  CHECK(trail_row.length->stddev == 0.0);

  // Manual aggregation over the same derived seeds must agree.
  const SuiteRow& mppi_row = rows[1];
  const TrialResult t0 = run_trial(sc, Method::MppiGeo, trial_seed(sc.sim.seed, 0));
  const TrialResult t1 = run_trial(sc, Method::MppiGeo, trial_seed(sc.sim.seed, 1));
  const double want_mean = 0.5 * (t0.metrics.progress + t1.metrics.progress);
  CHECK(mppi_row.progress.mean == doctest::Approx(want_mean).epsilon(1e-15));
  CHECK(mppi_row.successes == (t0.metrics.success ? 1 : 0) + (t1.metrics.success ? 1 : 0));

  CHECK_THROWS_AS(run_suite({}, {Method::Trail}, 1), ConfigInvalid);
}

TEST_CASE("suite exports carry absent metrics as empty cells or nulls") {
  const ScenarioConfig blocked = ScenarioConfig::from_file(scenario_path("blocked.json"));
  const std::vector<SuiteRow> rows = run_suite({blocked}, {Method::Trail}, 1);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].successes == 0);
  CHECK_FALSE(rows[0].time.has_value());

  const std::string csv = suite_to_csv(rows);
  const std::string header = csv.substr(0, csv.find('\n'));
  CHECK(header ==
        "scenario,method,trials,successes,progress_mean,progress_std,"
        "time_mean,time_std,length_mean,length_std,"
        "az_rms_mean_mean,az_rms_mean_std,az_max_mean,az_max_std");
  const std::string row = csv.substr(csv.find('\n') + 1);
  CHECK(row.find(",,,,,,,,") != std::string::npos);  // eight empty success-only cells

  const std::string js = suite_to_json(rows);
  CHECK(js.find("\"time\": null") != std::string::npos);
}

TEST_CASE("plot exports reload as grids and span the logged speeds") {
  const ScenarioConfig sc = ScenarioConfig::from_file(scenario_path("flat.json"));
  const TrialResult tr = run_trial(sc, Method::Trail, 1);
  REQUIRE_FALSE(tr.log.empty());

  const PlotData plot = export_plot_data(tr);
  const CostGrid grid = CostGrid::from_raster_json(plot.cost_raster_json);
  CHECK(grid.rows == tr.planning_grid.rows);
  CHECK(grid.cols == tr.planning_grid.cols);
  CHECK(grid.cost == tr.planning_grid.cost);

  CHECK(plot.trajectory_json.find("\"v_min\"") != std::string::npos);
  CHECK(plot.trajectory_json.find("\"v_max\"") != std::string::npos);

  const std::string head = plot.optimizer_trace_csv.substr(0, plot.optimizer_trace_csv.find('\n'));
  CHECK(head == "iteration,value,time,bump,smooth,curvature,grad_norm");
  std::size_t lines = 0;
  for (char c : plot.optimizer_trace_csv) lines += c == '\n' ? 1 : 0;
  CHECK(lines == tr.trace.size() + 1);
}
