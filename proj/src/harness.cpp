#include "trail/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "trail/errors.hpp"
#include "trail/spline.hpp"

namespace trail {

using nlohmann::json;

namespace {

// splitmix64 step, used to derive independent per-trial and per-step seeds.
std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double get_num(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw ConfigInvalid(std::string("missing or non-numeric field: ") + key);
  }
  return j[key].get<double>();
}

double get_num_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigInvalid(std::string("non-numeric field: ") + key);
  return j[key].get<double>();
}

int get_int_or(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) throw ConfigInvalid(std::string("non-integer field: ") + key);
  return j[key].get<int>();
}

Bounds parse_region(const json& j) {
  Bounds b{get_num(j, "x_min"), get_num(j, "x_max"), get_num(j, "y_min"), get_num(j, "y_max")};
  if (b.empty()) throw ConfigInvalid("region must have positive extent");
  return b;
}

std::shared_ptr<const TerrainField> parse_field(const json& j, const Bounds& region,
                                                const char* which) {
  if (!j.is_object()) throw ConfigInvalid(std::string(which) + " section must be an object");
  auto field = std::make_shared<AnalyticField>(region);
  field->add_constant(get_num_or(j, "base", 0.0));
  std::shared_ptr<const TerrainField> raster;
  if (j.contains("primitives")) {
    if (!j["primitives"].is_array()) {
      throw ConfigInvalid(std::string(which) + ".primitives must be an array");
    }
    for (const json& p : j["primitives"]) {
      const std::string type = p.value("type", "");
      if (type == "plane") {
        field->add_plane({get_num_or(p, "ax", 0.0), get_num_or(p, "by", 0.0),
                          get_num_or(p, "c", 0.0)});
      } else if (type == "gaussian_bump") {
        const double sigma = get_num(p, "sigma");
        if (!(sigma > 0.0)) throw ConfigInvalid("gaussian_bump sigma must be positive");
        field->add_bump({{get_num(p, "x"), get_num(p, "y")}, get_num(p, "amplitude"), sigma});
      } else if (type == "box_step") {
        const Bounds rect = parse_region(p);
        const double edge = get_num_or(p, "edge", 0.1);
        if (!(edge > 0.0)) throw ConfigInvalid("box_step edge must be positive");
        field->add_box({rect, get_num(p, "height"), edge});
      } else if (type == "raster") {
        raster = std::make_shared<GriddedField>(GriddedField::from_raster_json(p.dump()));
      } else {
        throw ConfigInvalid("unknown field primitive type: " + type);
      }
    }
  }
  std::shared_ptr<const TerrainField> out = field;
  if (raster) {
    out = std::make_shared<SumField>(
        region, std::vector<std::shared_ptr<const TerrainField>>{field, raster});
  }
  if (j.value("squash", false)) out = squash_to_unit(out);
  return out;
}

void parse_limits(const json& j, VehicleLimits* lim) {
  lim->v_max = get_num_or(j, "v_max", lim->v_max);
  lim->v_min = get_num_or(j, "v_min", lim->v_min);
  lim->a_lat_max = get_num_or(j, "a_lat_max", lim->a_lat_max);
  lim->a_acc = get_num_or(j, "a_acc", lim->a_acc);
  lim->a_dec = get_num_or(j, "a_dec", lim->a_dec);
  lim->omega_min = get_num_or(j, "omega_min", lim->omega_min);
  lim->omega_max = get_num_or(j, "omega_max", lim->omega_max);
  if (!(lim->v_max > 0.0) || lim->v_min < 0.0 || lim->v_min > lim->v_max) {
    throw ConfigInvalid("limits: need 0 <= v_min <= v_max and v_max > 0");
  }
  if (!(lim->a_lat_max > 0.0) || !(lim->a_acc > 0.0) || !(lim->a_dec > 0.0)) {
    throw ConfigInvalid("limits: accelerations must be positive");
  }
  if (!(lim->omega_max > lim->omega_min)) {
    throw ConfigInvalid("limits: omega_max must exceed omega_min");
  }
}

void parse_trail(const json& j, TrailParams* t) {
  if (j.contains("costmap")) {
    const json& c = j["costmap"];
    t->costmap.max_slope = get_num_or(c, "max_slope", t->costmap.max_slope);
    t->costmap.max_step = get_num_or(c, "max_step", t->costmap.max_step);
    t->costmap.coarse_resolution = get_num_or(c, "resolution", t->costmap.coarse_resolution);
    t->inflate_radius = get_num_or(c, "inflate_radius", t->inflate_radius);
  }
  if (j.contains("astar")) {
    const json& a = j["astar"];
    t->astar.cost_floor = get_num_or(a, "cost_floor", t->astar.cost_floor);
    t->astar.lethal_threshold = get_num_or(a, "lethal_threshold", t->astar.lethal_threshold);
  }
  t->control_points = get_int_or(j, "control_points", t->control_points);
  if (t->control_points < 2) throw ConfigInvalid("trail.control_points must be at least 2");
  if (j.contains("objective")) {
    const json& o = j["objective"];
    t->weights.lambda_b = get_num_or(o, "lambda_b", t->weights.lambda_b);
    t->weights.lambda_s = get_num_or(o, "lambda_s", t->weights.lambda_s);
    t->weights.lambda_kappa = get_num_or(o, "lambda_kappa", t->weights.lambda_kappa);
  }
  if (j.contains("speed")) {
    const json& s = j["speed"];
    t->speed.tau = get_num_or(s, "tau", t->speed.tau);
    t->speed.eps_kappa = get_num_or(s, "eps_kappa", t->speed.eps_kappa);
    t->speed.w_time = get_num_or(s, "w_time", t->speed.w_time);
    t->speed.w_bump = get_num_or(s, "w_bump", t->speed.w_bump);
    t->speed.alpha = get_int_or(s, "alpha", t->speed.alpha);
    t->speed.eps_bump = get_num_or(s, "eps_bump", t->speed.eps_bump);
    if (t->speed.alpha < 1) throw ConfigInvalid("speed.alpha must be a positive integer");
  }
  if (j.contains("footprint")) {
    const json& f = j["footprint"];
    t->footprint.side = get_num_or(f, "side", t->footprint.side);
    t->footprint.samples_per_side = get_int_or(f, "samples", t->footprint.samples_per_side);
  }
  if (j.contains("optimizer")) {
    const json& o = j["optimizer"];
    t->optimizer.learning_rate = get_num_or(o, "learning_rate", t->optimizer.learning_rate);
    t->optimizer.iterations = get_int_or(o, "iterations", t->optimizer.iterations);
    t->optimizer.grad_clip_norm = get_num_or(o, "grad_clip_norm", t->optimizer.grad_clip_norm);
    t->optimizer.n_dense = get_int_or(o, "n_dense", t->optimizer.n_dense);
  }
  if (j.contains("mpc")) {
    const json& m = j["mpc"];
    if (m.contains("q")) m["q"].get_to(t->mpc.q);
    if (m.contains("r")) m["r"].get_to(t->mpc.r);
    if (m.contains("q_n")) m["q_n"].get_to(t->mpc.q_n);
    t->mpc.horizon = get_int_or(m, "horizon", t->mpc.horizon);
    t->mpc.dt = get_num_or(m, "dt", t->mpc.dt);
    t->mpc.iterations = get_int_or(m, "iterations", t->mpc.iterations);
    t->mpc.learning_rate = get_num_or(m, "learning_rate", t->mpc.learning_rate);
  }
}

void parse_mppi(const json& j, MppiConfig* m) {
  m->horizon = get_int_or(j, "horizon", m->horizon);
  m->dt = get_num_or(j, "dt", m->dt);
  m->samples = get_int_or(j, "samples", m->samples);
  m->temperature = get_num_or(j, "temperature", m->temperature);
  if (j.contains("sigma")) {
    const json& s = j["sigma"];
    if (!s.is_array() || s.size() != 2) throw ConfigInvalid("mppi.sigma must be [sigma_v, sigma_omega]");
    m->sigma_v = s[0].get<double>();
    m->sigma_omega = s[1].get<double>();
  }
  if (j.contains("weights")) {
    const json& w = j["weights"];
    m->weights.goal_dist = get_num_or(w, "goal_dist", m->weights.goal_dist);
    m->weights.terrain_cost = get_num_or(w, "terrain_cost", m->weights.terrain_cost);
    m->weights.control_effort = get_num_or(w, "control_effort", m->weights.control_effort);
    m->weights.terminal = get_num_or(w, "terminal", m->weights.terminal);
    m->weights.path_deviation = get_num_or(w, "path_deviation", m->weights.path_deviation);
  }
  if (m->samples < 1 || m->horizon < 1 || !(m->temperature > 0.0) || !(m->sigma_v > 0.0) ||
      !(m->sigma_omega > 0.0) || !(m->dt > 0.0)) {
    throw ConfigInvalid("mppi: need samples >= 1, horizon >= 1, positive dt, temperature, sigma");
  }
}

void parse_sim(const json& j, SimParams* s) {
  s->time_cap = get_num_or(j, "time_cap", s->time_cap);
  s->dt = get_num_or(j, "dt", s->dt);
  s->replan_period = get_num_or(j, "replan_period", s->replan_period);
  s->goal_radius = get_num_or(j, "goal_radius", s->goal_radius);
  s->trials = get_int_or(j, "trials", s->trials);
  if (j.contains("seed")) s->seed = j["seed"].get<std::uint64_t>();
  if (!(s->time_cap > 0.0)) throw ConfigInvalid("sim.time_cap must be positive");
  if (!(s->dt > 0.0) || !(s->replan_period > 0.0)) {
    throw ConfigInvalid("sim.dt and sim.replan_period must be positive");
  }
  if (!(s->goal_radius > 0.0)) throw ConfigInvalid("sim.goal_radius must be positive");
  if (s->trials < 1) throw ConfigInvalid("sim.trials must be at least 1");
}

// Scalar JSON with shortest-round-trip doubles; key order is fixed by
// construction so identical metrics serialize identically.
json metrics_json(const RunMetrics& m) {
  json j = json::object();
  j["success"] = m.success;
  j["progress"] = m.progress;
  if (m.success) {
    j["time"] = m.time;
    j["length"] = m.length;
    j["az_rms_mean"] = m.az_rms_mean;
    j["az_max"] = m.az_max;
  }
  return j;
}

// RMS over sliding windows of `window` samples (stride 1), then mean and max
// over the window series. Short logs get one window spanning everything.
void az_window_stats(const std::vector<double>& az, int window, double* mean_out,
                     double* max_out) {
  *mean_out = 0.0;
  *max_out = 0.0;
  if (az.empty()) return;
  const int n = static_cast<int>(az.size());
  const int w = std::min(window, n);
  double sum = 0.0;
  for (int i = 0; i < w; ++i) sum += az[i] * az[i];
  double acc = 0.0;
  double mx = 0.0;
  int count = 0;
  for (int i = 0;; ++i) {
    const double rms = std::sqrt(sum / w);
    acc += rms;
    mx = std::max(mx, rms);
    ++count;
    if (i + w >= n) break;
    sum += az[i + w] * az[i + w] - az[i] * az[i];
    sum = std::max(sum, 0.0);
  }
  *mean_out = acc / count;
  *max_out = mx;
}

struct EpisodeState {
  UnicycleState pose;
  double travelled = 0.0;
  double applied_v = 0.0;
};

void log_step(RolloutLog* log, double t, const EpisodeState& es, const ControlInput& cmd,
              const ControlInput& applied, double bump_val) {
  log->t.push_back(t);
  log->x.push_back(es.pose.x);
  log->y.push_back(es.pose.y);
  log->theta.push_back(wrap_angle(es.pose.theta));
  log->v.push_back(applied.v);
  log->omega.push_back(applied.omega);
  log->v_cmd.push_back(cmd.v);
  log->omega_cmd.push_back(cmd.omega);
  log->bump.push_back(bump_val);
  log->az.push_back(bump_val * applied.v);
}

void finish_metrics(const ScenarioConfig& sc, const EpisodeState& es, bool success, double t,
                    const RolloutLog& log, double az_dt, RunMetrics* m) {
  m->success = success;
  const double init_dist = distance({sc.start.x, sc.start.y}, sc.goal);
  if (success) {
    m->progress = 1.0;
    m->time = t;
    m->length = es.travelled;
    const int window = std::max(1, static_cast<int>(std::lround(0.1 / az_dt)));
    az_window_stats(log.az, window, &m->az_rms_mean, &m->az_max);
  } else {
    const double final_dist = distance({es.pose.x, es.pose.y}, sc.goal);
    m->progress = init_dist > 0.0 ? std::clamp(1.0 - final_dist / init_dist, 0.0, 1.0) : 0.0;
  }
}

// Full planning pipeline for one replan cycle. Throws NoPath when A* finds
// no corridor from the current pose.
Trajectory plan_trail(const ScenarioConfig& sc, const TrailParams& tp, const CostGrid& grid,
                      const UnicycleState& pose, double v_start,
                      std::vector<OptimizeTraceRow>* trace) {
  GridPath gp = plan(grid, {pose.x, pose.y}, sc.goal, tp.astar);
  std::vector<Point2> pts = downsample_path(gp, tp.control_points);
  // A* snapped both endpoints to cell centers; pin them back to the pose
  // and the true goal.
  pts.front() = {pose.x, pose.y};
  pts.back() = sc.goal;
  ControlPolygon ctrl{std::move(pts)};

  OptimizerConfig ocfg = tp.optimizer;
  ocfg.bounds = sc.region;
  ctrl = optimize(ctrl, *sc.bumpiness, tp.weights, tp.speed, tp.footprint, ocfg, trace);

  const DensePath dense = interpolate(ctrl, ocfg.n_dense);
  std::vector<double> bump_vals(dense.points.size());
  for (std::size_t i = 0; i < dense.points.size(); ++i) {
    const std::size_t a = i > 0 ? i - 1 : 0;
    const std::size_t b = i + 1 < dense.points.size() ? i + 1 : i;
    const Vec2 d = dense.points[b] - dense.points[a];
    const double yaw = std::atan2(d.y, d.x);
    bump_vals[i] = footprint_bumpiness(*sc.bumpiness, dense.points[i], yaw, tp.footprint);
  }
  try {
    return time_scale(dense, bump_vals, sc.limits, tp.speed, v_start, 0.0);
  } catch (const InfeasibleBoundary&) {
    // Entry speed too high to brake within the new plan; replan from rest
    // and let the tracker absorb the mismatch.
    return time_scale(dense, bump_vals, sc.limits, tp.speed, 0.0, 0.0);
  }
}

TrialResult run_trail_trial(const ScenarioConfig& sc) {
  TrialResult result;
  CostGrid grid = build_geometric_costmap(*sc.elevation, sc.region, sc.trail.costmap);
  if (sc.trail.inflate_radius > 0.0) grid = inflate(grid, sc.trail.inflate_radius);
  result.planning_grid = grid;

  TrailParams tp = sc.trail;
  tp.speed.v_max = sc.limits.v_max;
  tp.speed.a_lat_max = sc.limits.a_lat_max;

  EpisodeState es{sc.start, 0.0, 0.0};
  const double dt = sc.sim.dt;
  TrajectoryTracker tracker(Trajectory{}, sc.trail.mpc, sc.limits);
  bool have_plan = false;
  bool first_plan = true;
  double plan_t0 = 0.0;
  double next_replan = 0.0;
  bool success = false;
  double t_final = 0.0;

  for (int k = 0;; ++k) {
    const double t = k * dt;
    if (distance({es.pose.x, es.pose.y}, sc.goal) <= sc.sim.goal_radius) {
      success = true;
      t_final = t;
      break;
    }
    if (t >= sc.sim.time_cap - 1e-9) break;

    if (t >= next_replan - 1e-9) {
      try {
        Trajectory traj = plan_trail(sc, tp, grid, es.pose, es.applied_v,
                                     first_plan ? &result.trace : nullptr);
        tracker.reset(std::move(traj));
        have_plan = true;
        first_plan = false;
        plan_t0 = t;
      } catch (const Error&) {
        if (!have_plan) {
          result.note = "no-path-at-start";
          break;
        }
        // keep tracking the previous plan until a corridor reappears
      }
      next_replan = t + sc.sim.replan_period;
    }

    const ControlInput cmd = tracker(t - plan_t0, es.pose);
    const ControlInput applied{std::clamp(cmd.v, sc.limits.v_min, sc.limits.v_max),
                               std::clamp(cmd.omega, sc.limits.omega_min, sc.limits.omega_max)};
    const double bump_val = sc.bumpiness->query({es.pose.x, es.pose.y}).value;
    log_step(&result.log, t, es, cmd, applied, bump_val);
    const UnicycleState next = step_dynamics(es.pose, applied, dt);
    es.travelled += distance({es.pose.x, es.pose.y}, {next.x, next.y});
    es.pose = next;
    es.applied_v = applied.v;
  }
  finish_metrics(sc, es, success, t_final, result.log, dt, &result.metrics);
  return result;
}

MppiVariant variant_of(Method m) {
  switch (m) {
    case Method::MppiGeo: return MppiVariant::Geo;
    case Method::MppiGeoTerm: return MppiVariant::GeoTerm;
    case Method::MppiBump: return MppiVariant::Bump;
    case Method::MppiAStarBump: return MppiVariant::AStarBump;
    default: return MppiVariant::Fused;
  }
}

TrialResult run_mppi_trial(const ScenarioConfig& sc, Method method, std::uint64_t seed) {
  TrialResult result;
  const MppiVariant variant = variant_of(method);

  CostGrid geo = build_geometric_costmap(*sc.elevation, sc.region, sc.trail.costmap);
  if (sc.trail.inflate_radius > 0.0) geo = inflate(geo, sc.trail.inflate_radius);

  CostGrid grid;
  std::vector<Point2> init_path;
  switch (variant) {
    case MppiVariant::Geo:
    case MppiVariant::GeoTerm:
      grid = geo;
      break;
    case MppiVariant::Bump:
      grid = rasterize_bumpiness(*sc.bumpiness, sc.region, sc.trail.costmap.coarse_resolution);
      break;
    case MppiVariant::AStarBump: {
      grid = rasterize_bumpiness(*sc.bumpiness, sc.region, sc.trail.costmap.coarse_resolution);
      try {
        GridPath gp = plan(geo, {sc.start.x, sc.start.y}, sc.goal, sc.trail.astar);
        init_path = std::move(gp.points);
      } catch (const Error&) {
        result.note = "no-path-at-start";
        result.planning_grid = geo;
        finish_metrics(sc, {sc.start, 0.0, 0.0}, false, 0.0, result.log, sc.mppi.dt,
                       &result.metrics);
        return result;
      }
      break;
    }
    case MppiVariant::Fused: {
      const CostGrid bump =
          rasterize_bumpiness(*sc.bumpiness, sc.region, sc.trail.costmap.coarse_resolution);
      grid = blend_costmaps(geo, bump, 0.5);
      break;
    }
  }
  result.planning_grid = grid;

  MppiConfig cfg = sc.mppi;
  cfg.limits = sc.limits;
  std::vector<ControlInput> nominal(cfg.horizon, {0.5 * sc.limits.v_max, 0.0});

  EpisodeState es{sc.start, 0.0, 0.0};
  bool success = false;
  double t_final = 0.0;
  for (int k = 0;; ++k) {
    const double t = k * cfg.dt;
    if (distance({es.pose.x, es.pose.y}, sc.goal) <= sc.sim.goal_radius) {
      success = true;
      t_final = t;
      break;
    }
    if (t >= sc.sim.time_cap - 1e-9) break;

    const MppiStepResult step =
        mppi_step(es.pose, nominal, grid, sc.goal, variant, cfg, mix64(seed, k),
                  init_path.empty() ? nullptr : &init_path);
    nominal = step.nominal;
    const ControlInput applied = step.input;  // already clamped by sampling
    const double bump_val = sc.bumpiness->query({es.pose.x, es.pose.y}).value;
    log_step(&result.log, t, es, applied, applied, bump_val);
    const UnicycleState next = step_dynamics(es.pose, applied, cfg.dt);
    es.travelled += distance({es.pose.x, es.pose.y}, {next.x, next.y});
    es.pose = next;
    es.applied_v = applied.v;
  }
  finish_metrics(sc, es, success, t_final, result.log, cfg.dt, &result.metrics);
  return result;
}

Stat stat_of(const std::vector<double>& xs) {
  Stat s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(var / static_cast<double>(xs.size()));
  return s;
}

json stat_json(const Stat& s) { return json{{"mean", s.mean}, {"std", s.stddev}}; }

}  // namespace

ScenarioConfig ScenarioConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigInvalid(std::string("scenario JSON parse error: ") + e.what());
  }
  try {
    if (j.value("schema", "") != "trail-scenario/1") {
      throw ConfigInvalid("scenario schema must be \"trail-scenario/1\"");
    }
    ScenarioConfig sc;
    sc.name = j.value("name", "scenario");
    if (!j.contains("region")) throw ConfigInvalid("scenario needs a region");
    sc.region = parse_region(j["region"]);
    sc.elevation = parse_field(j.value("elevation", json::object()), sc.region, "elevation");
    sc.bumpiness = parse_field(j.value("bumpiness", json::object()), sc.region, "bumpiness");
    if (!j.contains("start") || !j.contains("goal")) {
      throw ConfigInvalid("scenario needs start and goal");
    }
    sc.start = {get_num(j["start"], "x"), get_num(j["start"], "y"),
                get_num_or(j["start"], "theta", 0.0)};
    sc.goal = {get_num(j["goal"], "x"), get_num(j["goal"], "y")};
    if (!sc.region.contains(Point2{sc.start.x, sc.start.y})) {
      throw ConfigInvalid("start lies outside the region");
    }
    if (!sc.region.contains(sc.goal)) throw ConfigInvalid("goal lies outside the region");
    if (j.contains("limits")) parse_limits(j["limits"], &sc.limits);
    if (j.contains("trail")) parse_trail(j["trail"], &sc.trail);
    if (j.contains("mppi")) parse_mppi(j["mppi"], &sc.mppi);
    if (j.contains("sim")) parse_sim(j["sim"], &sc.sim);
    // the speed model's hard caps always mirror the vehicle limits
    sc.trail.speed.v_max = sc.limits.v_max;
    sc.trail.speed.a_lat_max = sc.limits.a_lat_max;
    return sc;
  } catch (const json::exception& e) {
    throw ConfigInvalid(std::string("scenario field error: ") + e.what());
  }
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

const char* method_name(Method m) {
  switch (m) {
    case Method::Trail: return "trail";
    case Method::MppiGeo: return "mppi-geo";
    case Method::MppiGeoTerm: return "mppi-geo-term";
    case Method::MppiBump: return "mppi-bump";
    case Method::MppiAStarBump: return "mppi-astar-bump";
    case Method::MppiFused: return "mppi-fused";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (Method m : all_methods()) {
    if (name == method_name(m)) return m;
  }
  throw ConfigInvalid("unknown method: " + name);
}

std::vector<Method> all_methods() {
  return {Method::Trail,     Method::MppiGeo,       Method::MppiGeoTerm,
          Method::MppiBump,  Method::MppiAStarBump, Method::MppiFused};
}

std::string metrics_to_json(const RunMetrics& m) { return metrics_json(m).dump(); }

std::uint64_t trial_seed(std::uint64_t scenario_seed, int trial_index) {
  return mix64(scenario_seed, static_cast<std::uint64_t>(trial_index) << 8);
}

TrialResult run_trial(const ScenarioConfig& scenario, Method method, std::uint64_t seed) {
  if (method == Method::Trail) return run_trail_trial(scenario);
  return run_mppi_trial(scenario, method, seed);
}

std::vector<SuiteRow> run_suite(const std::vector<ScenarioConfig>& scenarios,
                                const std::vector<Method>& methods, int trials) {
  if (scenarios.empty()) throw ConfigInvalid("suite needs at least one scenario");
  std::vector<SuiteRow> rows;
  for (const ScenarioConfig& sc : scenarios) {
    for (Method m : methods) {
      const int n = trials > 0 ? trials : sc.sim.trials;
      SuiteRow row;
      row.scenario = sc.name;
      row.method = method_name(m);
      row.trials = n;
      std::vector<double> progress, time, length, az_mean, az_max;
      for (int i = 0; i < n; ++i) {
        const TrialResult tr = run_trial(sc, m, trial_seed(sc.sim.seed, i));
        progress.push_back(tr.metrics.progress);
        if (tr.metrics.success) {
          ++row.successes;
          time.push_back(tr.metrics.time);
          length.push_back(tr.metrics.length);
          az_mean.push_back(tr.metrics.az_rms_mean);
          az_max.push_back(tr.metrics.az_max);
        }
      }
      row.progress = stat_of(progress);
      if (row.successes > 0) {
        row.time = stat_of(time);
        row.length = stat_of(length);
        row.az_rms_mean = stat_of(az_mean);
        row.az_max = stat_of(az_max);
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string suite_to_csv(const std::vector<SuiteRow>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "scenario,method,trials,successes,progress_mean,progress_std,"
        "time_mean,time_std,length_mean,length_std,"
        "az_rms_mean_mean,az_rms_mean_std,az_max_mean,az_max_std\n";
  auto cell = [&os](const std::optional<Stat>& s) {
    if (s) {
      os << ',' << s->mean << ',' << s->stddev;
    } else {
      os << ",,";  // absent: metric defined only on successful runs
    }
  };
  for (const SuiteRow& r : rows) {
    os << r.scenario << ',' << r.method << ',' << r.trials << ',' << r.successes << ','
       << r.progress.mean << ',' << r.progress.stddev;
    cell(r.time);
    cell(r.length);
    cell(r.az_rms_mean);
    cell(r.az_max);
    os << '\n';
  }
  return os.str();
}

std::string suite_to_json(const std::vector<SuiteRow>& rows) {
  json arr = json::array();
  for (const SuiteRow& r : rows) {
    json row = json::object();
    row["scenario"] = r.scenario;
    row["method"] = r.method;
    row["trials"] = r.trials;
    row["successes"] = r.successes;
    row["progress"] = stat_json(r.progress);
    row["time"] = r.time ? stat_json(*r.time) : json(nullptr);
    row["length"] = r.length ? stat_json(*r.length) : json(nullptr);
    row["az_rms_mean"] = r.az_rms_mean ? stat_json(*r.az_rms_mean) : json(nullptr);
    row["az_max"] = r.az_max ? stat_json(*r.az_max) : json(nullptr);
    arr.push_back(std::move(row));
  }
  return arr.dump(2);
}

PlotData export_plot_data(const TrialResult& trial) {
  if (trial.log.empty()) throw EmptyLog("trial produced no rollout samples");
  PlotData out;
  out.cost_raster_json = trial.planning_grid.to_raster_json();

  json traj = json::object();
  json pts = json::array();
  double v_lo = trial.log.v.front();
  double v_hi = trial.log.v.front();
  for (std::size_t i = 0; i < trial.log.size(); ++i) {
    pts.push_back({{"x", trial.log.x[i]}, {"y", trial.log.y[i]}, {"v", trial.log.v[i]}});
    v_lo = std::min(v_lo, trial.log.v[i]);
    v_hi = std::max(v_hi, trial.log.v[i]);
  }
  traj["points"] = std::move(pts);
  traj["v_min"] = v_lo;
  traj["v_max"] = v_hi;
  out.trajectory_json = traj.dump();

  std::ostringstream os;
  os.precision(17);
  os << "iteration,value,time,bump,smooth,curvature,grad_norm\n";
  for (const OptimizeTraceRow& r : trial.trace) {
    os << r.iteration << ',' << r.value << ',' << r.terms.time << ',' << r.terms.bump << ','
       << r.terms.smooth << ',' << r.terms.curvature << ',' << r.grad_norm << '\n';
  }
  out.optimizer_trace_csv = os.str();
  return out;
}

}  // namespace trail
