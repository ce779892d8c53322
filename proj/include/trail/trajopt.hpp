#pragma once

#include <vector>

#include "trail/autodiff.hpp"
#include "trail/field.hpp"
#include "trail/geometry.hpp"
#include "trail/spline.hpp"

namespace trail {

struct SpeedParams {
  double v_max = 3.0;       // m/s
  double a_lat_max = 2.0;   // m/s^2
  double tau = 0.1;         // smooth-min temperature, speed units
  double eps_kappa = 1e-6;  // 1/m, keeps the curvature cap finite
  double w_time = 1.0;
  double w_bump = 1.0;
  int alpha = 2;            // bumpiness exponent, positive integer
  double eps_bump = 1e-3;
};

struct ObjectiveWeights {
  double lambda_b = 1.0;      // speed-weighted bump cost
  double lambda_s = 1.0;      // segment-length smoothness
  double lambda_kappa = 0.1;  // curvature smoothness
};

struct FootprintSpec {
  double side = 0.5;         // h, meters
  int samples_per_side = 3;  // k
};

struct OptimizerConfig {
  double learning_rate = 0.05;
  int iterations = 50;
  double grad_clip_norm = 1.0;
  Bounds bounds;  // planning rectangle; empty disables projection
  int n_dense = 64;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double moment_eps = 1e-8;
};

// Smooth minimum -tau*log(exp(-a/tau) + exp(-b/tau)), evaluated in shifted
// form around min(a,b). Always <= min(a,b), and >= min(a,b) - tau*ln 2.
double smin(double a, double b, double tau);

// Mean bumpiness over a k x k lattice spanning the h x h square footprint
// rotated by yaw about center. The gradient is w.r.t. the center only; the
// rotation is held fixed.
double footprint_bumpiness(const TerrainField& bump, Point2 center, double yaw,
                           const FootprintSpec& fp);
FieldSample footprint_sample(const TerrainField& bump, Point2 center, double yaw,
                             const FootprintSpec& fp);

// Per-sample soft speed: v_i = smin(v_cap_i, v_pref_i) with
//   v_cap_i  = smin(v_max, sqrt(a_lat_max / (|kappa_i| + eps_kappa)))
//   v_pref_i = sqrt(w_time / (w_bump * (b_i^alpha + eps_bump)))
std::vector<double> speed_profile_soft(const DensePath& path, const std::vector<double>& bump_vals,
                                       const SpeedParams& params);

struct ObjectiveTerms {
  double time = 0.0;
  double bump = 0.0;
  double smooth = 0.0;
  double curvature = 0.0;
};

struct ObjectiveResult {
  double value = 0.0;
  ObjectiveTerms terms;
  std::vector<Vec2> gradient;  // one entry per interior control point
};

// J = sum ds_i/vbar_i + lambda_b * sum bbar_i*vbar_i*ds_i
//   + lambda_s * sum ds_i^2 + lambda_kappa * sum kbar_i^2 (skipping the first
// segment). The gradient is the recorded derivative of exactly this pipeline,
// including the spline resampling and footprint chains.
ObjectiveResult objective(const ControlPolygon& ctrl, const TerrainField& bump,
                          const ObjectiveWeights& weights, const SpeedParams& params,
                          const FootprintSpec& fp, int n_dense = 64);

// Value and term breakdown without building a tape.
double objective_value(const ControlPolygon& ctrl, const TerrainField& bump,
                       const ObjectiveWeights& weights, const SpeedParams& params,
                       const FootprintSpec& fp, int n_dense = 64,
                       ObjectiveTerms* terms = nullptr);

struct OptimizeTraceRow {
  int iteration = 0;
  double value = 0.0;
  ObjectiveTerms terms;
  double grad_norm = 0.0;
};

// Adam over the interior control points with global gradient-norm clipping
// and projection into cfg.bounds. Endpoints stay untouched; the best iterate
// seen (including the initial polygon) is returned.
ControlPolygon optimize(const ControlPolygon& initial, const TerrainField& bump,
                        const ObjectiveWeights& weights, const SpeedParams& params,
                        const FootprintSpec& fp, const OptimizerConfig& cfg,
                        std::vector<OptimizeTraceRow>* trace = nullptr);

}  // namespace trail
