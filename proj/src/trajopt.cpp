#include "trail/trajopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trail/errors.hpp"

namespace trail {

namespace {

template <class S>
S smin_tau(const S& a, const S& b, double tau) {
  using std::exp;
  using std::log1p;
  using ad::exp;
  using ad::log1p;
  // Factored around the smaller argument so the exponent is never positive.
  if (value_of(a) <= value_of(b)) {
    return a - tau * log1p(exp((a - b) * (1.0 / tau)));
  }
  return b - tau * log1p(exp((b - a) * (1.0 / tau)));
}

double field_value_at(const TerrainField& f, double x, double y) {
  return f.query({x, y}).value;
}

ad::Var field_value_at(const TerrainField& f, const ad::Var& x, const ad::Var& y) {
  const FieldSample s = f.query({x.value(), y.value()});
  return ad::external_sample(x, y, s.value, s.gradient.x, s.gradient.y);
}

template <class S>
S footprint_mean(const TerrainField& f, const S& px, const S& py, const S& cy, const S& sy,
                 const FootprintSpec& fp) {
  const int k = fp.samples_per_side;
  const double step = k > 1 ? fp.side / (k - 1) : 0.0;
  const double start = k > 1 ? -0.5 * fp.side : 0.0;
  S acc(0.0);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      const double ox = start + step * a;
      const double oy = start + step * b;
      acc += field_value_at(f, px + (cy * ox - sy * oy), py + (sy * ox + cy * oy));
    }
  }
  return acc * (1.0 / (k * k));
}

template <class S>
S soft_speed(const S& kappa, const S& bump, const SpeedParams& sp) {
  using std::sqrt;
  using ad::sqrt;
  using std::abs;
  using ad::abs;
  const S cap_curv = sqrt(S(sp.a_lat_max) / (abs(kappa) + sp.eps_kappa));
  const S v_cap = smin_tau(S(sp.v_max), cap_curv, sp.tau);
  const S denom = S(sp.w_bump) * (pow_int(bump, sp.alpha) + sp.eps_bump);
  const S v_pref = sqrt(S(sp.w_time) / denom);
  return smin_tau(v_cap, v_pref, sp.tau);
}

template <class S>
struct ObjectiveEval {
  S total, time, bump, smooth, curvature;
};

template <class S>
ObjectiveEval<S> evaluate_objective(const std::vector<detail::P2<S>>& ctrl,
                                    const TerrainField& bump_field, const ObjectiveWeights& w,
                                    const SpeedParams& sp, const FootprintSpec& fp, int n_dense) {
  using std::max;
  using ad::max;
  using std::sqrt;
  using ad::sqrt;
  const auto chain = detail::build_dense_chain<S>(ctrl, n_dense);
  const int n = static_cast<int>(chain.pts.size());

  // Footprint rotation from the normalized forward tangent. Differentiating
  // through it keeps the gradient the exact derivative of this evaluation.
  std::vector<S> b(n), v(n);
  for (int i = 0; i < n; ++i) {
    const int j = i + 1 < n ? i : i - 1;  // last point reuses its entry tangent
    const S tx = chain.pts[j + 1].x - chain.pts[j].x;
    const S ty = chain.pts[j + 1].y - chain.pts[j].y;
    const S inv = 1.0 / sqrt(tx * tx + ty * ty + 1e-18);
    b[i] = footprint_mean(bump_field, chain.pts[i].x, chain.pts[i].y, tx * inv, ty * inv, fp);
    v[i] = soft_speed(chain.curvature[i], b[i], sp);
  }

  ObjectiveEval<S> out{S(0.0), S(0.0), S(0.0), S(0.0), S(0.0)};
  for (int i = 0; i + 1 < n; ++i) {
    const S ds = chain.seg_len[i];
    const S vbar_raw = 0.5 * (v[i] + v[i + 1]);
    const S vbar = max(vbar_raw, S(1e-3));  // guard against pathological params
    const S bbar = 0.5 * (b[i] + b[i + 1]);
    out.time += ds / vbar;
    out.bump += bbar * vbar * ds;
    out.smooth += ds * ds;
    if (i >= 1) {  // curvature sum starts at the second segment
      const S kbar = 0.5 * (chain.curvature[i] + chain.curvature[i + 1]);
      out.curvature += kbar * kbar;
    }
  }
  out.total = out.time + w.lambda_b * out.bump + w.lambda_s * out.smooth +
              w.lambda_kappa * out.curvature;
  return out;
}

std::vector<detail::P2<double>> as_p2(const ControlPolygon& ctrl) {
  std::vector<detail::P2<double>> out(ctrl.points.size());
  for (std::size_t i = 0; i < ctrl.points.size(); ++i) {
    out[i] = {ctrl.points[i].x, ctrl.points[i].y};
  }
  return out;
}

}  // namespace

double smin(double a, double b, double tau) {
  return smin_tau<double>(a, b, tau);
}

double footprint_bumpiness(const TerrainField& bump, Point2 center, double yaw,
                           const FootprintSpec& fp) {
  return footprint_mean<double>(bump, center.x, center.y, std::cos(yaw), std::sin(yaw), fp);
}

FieldSample footprint_sample(const TerrainField& bump, Point2 center, double yaw,
                             const FootprintSpec& fp) {
  const double cy = std::cos(yaw);
  const double sy = std::sin(yaw);
  const int k = fp.samples_per_side;
  const double step = k > 1 ? fp.side / (k - 1) : 0.0;
  const double start = k > 1 ? -0.5 * fp.side : 0.0;
  FieldSample acc;
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      const double ox = start + step * a;
      const double oy = start + step * b;
      const FieldSample s =
          bump.query({center.x + cy * ox - sy * oy, center.y + sy * ox + cy * oy});
      acc.value += s.value;
      acc.gradient += s.gradient;
    }
  }
  const double inv = 1.0 / (k * k);
  return {acc.value * inv, {acc.gradient.x * inv, acc.gradient.y * inv}};
}

std::vector<double> speed_profile_soft(const DensePath& path, const std::vector<double>& bump_vals,
                                       const SpeedParams& params) {
  if (bump_vals.size() != path.points.size()) {
    throw ShapeMismatch("one bumpiness value per dense sample required");
  }
  std::vector<double> v(path.points.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = soft_speed<double>(path.curvatures[i], bump_vals[i], params);
  }
  return v;
}

ObjectiveResult objective(const ControlPolygon& ctrl, const TerrainField& bump,
                          const ObjectiveWeights& weights, const SpeedParams& params,
                          const FootprintSpec& fp, int n_dense) {
  const int m = static_cast<int>(ctrl.points.size());
  if (m < 2) throw TooFewPoints("objective needs at least two control points");

  ad::Tape tape;
  tape.reserve(1u << 17);
  std::vector<detail::P2<ad::Var>> cv(m);
  for (int i = 0; i < m; ++i) {
    if (i == 0 || i == m - 1) {
      cv[i] = {ad::Var(ctrl.points[i].x), ad::Var(ctrl.points[i].y)};
    } else {
      cv[i] = {tape.input(ctrl.points[i].x), tape.input(ctrl.points[i].y)};
    }
  }
  const auto eval = evaluate_objective<ad::Var>(cv, bump, weights, params, fp, n_dense);
  const auto adj = tape.gradient(eval.total);

  ObjectiveResult out;
  out.value = eval.total.value();
  out.terms = {eval.time.value(), eval.bump.value(), eval.smooth.value(),
               eval.curvature.value()};
  out.gradient.resize(m > 2 ? m - 2 : 0);
  for (int i = 1; i + 1 < m; ++i) {
    out.gradient[i - 1] = {ad::Tape::adjoint(adj, cv[i].x), ad::Tape::adjoint(adj, cv[i].y)};
  }
  return out;
}

double objective_value(const ControlPolygon& ctrl, const TerrainField& bump,
                       const ObjectiveWeights& weights, const SpeedParams& params,
                       const FootprintSpec& fp, int n_dense, ObjectiveTerms* terms) {
  const auto eval = evaluate_objective<double>(as_p2(ctrl), bump, weights, params, fp, n_dense);
  if (terms) *terms = {eval.time, eval.bump, eval.smooth, eval.curvature};
  return eval.total;
}

ControlPolygon optimize(const ControlPolygon& initial, const TerrainField& bump,
                        const ObjectiveWeights& weights, const SpeedParams& params,
                        const FootprintSpec& fp, const OptimizerConfig& cfg,
                        std::vector<OptimizeTraceRow>* trace) {
  const int m = static_cast<int>(initial.points.size());
  if (m < 3) return initial;  // nothing to move
  const int dim = 2 * (m - 2);

  std::vector<double> theta(dim);
  for (int i = 1; i + 1 < m; ++i) {
    theta[2 * (i - 1)] = initial.points[i].x;
    theta[2 * (i - 1) + 1] = initial.points[i].y;
  }

  auto polygon_of = [&](const std::vector<double>& t) {
    ControlPolygon p = initial;
    for (int i = 1; i + 1 < m; ++i) {
      p.points[i] = {t[2 * (i - 1)], t[2 * (i - 1) + 1]};
    }
    return p;
  };

  auto project = [&](std::vector<double>* t) {
    if (cfg.bounds.empty()) return;
    for (int i = 0; i < dim; i += 2) {
      (*t)[i] = std::clamp((*t)[i], cfg.bounds.x_min, cfg.bounds.x_max);
      (*t)[i + 1] = std::clamp((*t)[i + 1], cfg.bounds.y_min, cfg.bounds.y_max);
    }
  };

  if (cfg.iterations <= 0) {
    if (trace) {
      ObjectiveTerms t0;
      const double j0 = objective_value(initial, bump, weights, params, fp, cfg.n_dense, &t0);
      trace->push_back({0, j0, t0, 0.0});
    }
    return initial;
  }

  // Iteration 1 evaluates the initial polygon, so the best iterate can never
  // be worse than it.
  std::vector<double> best = theta;
  double best_value = std::numeric_limits<double>::infinity();

  std::vector<double> m1(dim, 0.0), m2(dim, 0.0), g(dim);
  for (int iter = 1; iter <= cfg.iterations; ++iter) {
    const ControlPolygon current = polygon_of(theta);
    const ObjectiveResult r = objective(current, bump, weights, params, fp, cfg.n_dense);
    if (r.value < best_value) {
      best_value = r.value;
      best = theta;
    }

    double norm_sq = 0.0;
    for (int i = 0; i < dim / 2; ++i) {
      g[2 * i] = r.gradient[i].x;
      g[2 * i + 1] = r.gradient[i].y;
      norm_sq += squared_norm(r.gradient[i]);
    }
    const double gnorm = std::sqrt(norm_sq);
    if (trace) trace->push_back({iter, r.value, r.terms, gnorm});

    if (cfg.grad_clip_norm > 0.0 && gnorm > cfg.grad_clip_norm) {
      const double s = cfg.grad_clip_norm / gnorm;
      for (double& gi : g) gi *= s;
    }
    const double bc1 = 1.0 - std::pow(cfg.beta1, iter);
    const double bc2 = 1.0 - std::pow(cfg.beta2, iter);
    for (int i = 0; i < dim; ++i) {
      m1[i] = cfg.beta1 * m1[i] + (1.0 - cfg.beta1) * g[i];
      m2[i] = cfg.beta2 * m2[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double mhat = m1[i] / bc1;
      const double vhat = m2[i] / bc2;
      theta[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.moment_eps);
    }
    project(&theta);
  }

  // The loop evaluated every iterate except the final projected one.
  const double last = objective_value(polygon_of(theta), bump, weights, params, fp, cfg.n_dense);
  if (last < best_value) {
    best_value = last;
    best = theta;
  }
  return polygon_of(best);
}

}  // namespace trail
