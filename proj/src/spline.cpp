#include "trail/spline.hpp"

#include <algorithm>
#include <cmath>

namespace trail {

double menger_curvature(Point2 a, Point2 b, Point2 c) {
  return detail::menger<double>({a.x, a.y}, {b.x, b.y}, {c.x, c.y});
}

namespace {

std::vector<detail::P2<double>> as_p2(const ControlPolygon& ctrl) {
  std::vector<detail::P2<double>> out(ctrl.points.size());
  for (std::size_t i = 0; i < ctrl.points.size(); ++i) {
    out[i] = {ctrl.points[i].x, ctrl.points[i].y};
  }
  return out;
}

}  // namespace

DensePath interpolate(const ControlPolygon& ctrl, int n_dense, int fine_per_segment) {
  const auto chain = detail::build_dense_chain<double>(as_p2(ctrl), n_dense, fine_per_segment);
  DensePath out;
  out.points.resize(chain.pts.size());
  for (std::size_t i = 0; i < chain.pts.size(); ++i) {
    out.points[i] = {chain.pts[i].x, chain.pts[i].y};
  }
  out.seg_lengths = chain.seg_len;
  out.curvatures = chain.curvature;
  out.total_length = chain.total;
  return out;
}

std::vector<Point2> evaluate_at_knots(const ControlPolygon& ctrl) {
  const auto sup = detail::make_support<double>(as_p2(ctrl));
  std::vector<Point2> out(ctrl.points.size());
  for (int j = 0; j < static_cast<int>(ctrl.points.size()); ++j) {
    const int seg = std::min(j, sup.segments - 1);  // last knot closes the last segment
    const auto p = sup.eval(seg, sup.knots[j + 1]);
    out[j] = {p.x, p.y};
  }
  return out;
}

JacobianReport path_jacobian_check(const ControlPolygon& ctrl, int n_dense, double fd_step) {
  const int m = static_cast<int>(ctrl.points.size());
  if (m < 3) throw TooFewPoints("jacobian check needs an interior control point");

  // Recorded derivatives of every dense coordinate w.r.t. interior controls.
  ad::Tape tape;
  tape.reserve(1u << 18);
  std::vector<detail::P2<ad::Var>> cv(m);
  std::vector<ad::Var> params;
  params.reserve(2 * (m - 2));
  for (int i = 0; i < m; ++i) {
    if (i == 0 || i == m - 1) {
      cv[i] = {ad::Var(ctrl.points[i].x), ad::Var(ctrl.points[i].y)};
    } else {
      cv[i] = {tape.input(ctrl.points[i].x), tape.input(ctrl.points[i].y)};
      params.push_back(cv[i].x);
      params.push_back(cv[i].y);
    }
  }
  const auto chain = detail::build_dense_chain<ad::Var>(cv, n_dense);

  const int n_param = static_cast<int>(params.size());
  std::vector<double> recorded(static_cast<std::size_t>(2 * n_dense) * n_param);
  for (int i = 0; i < n_dense; ++i) {
    const auto gx = tape.gradient(chain.pts[i].x);
    const auto gy = tape.gradient(chain.pts[i].y);
    for (int p = 0; p < n_param; ++p) {
      recorded[(2 * i + 0) * static_cast<std::size_t>(n_param) + p] =
          ad::Tape::adjoint(gx, params[p]);
      recorded[(2 * i + 1) * static_cast<std::size_t>(n_param) + p] =
          ad::Tape::adjoint(gy, params[p]);
    }
  }

  // Central finite differences of the plain-double pipeline.
  std::vector<double> fd(recorded.size());
  for (int p = 0; p < n_param; ++p) {
    const int ci = 1 + p / 2;
    const bool is_x = (p % 2) == 0;
    ControlPolygon plus = ctrl, minus = ctrl;
    (is_x ? plus.points[ci].x : plus.points[ci].y) += fd_step;
    (is_x ? minus.points[ci].x : minus.points[ci].y) -= fd_step;
    const DensePath dp = interpolate(plus, n_dense);
    const DensePath dm = interpolate(minus, n_dense);
    for (int i = 0; i < n_dense; ++i) {
      fd[(2 * i + 0) * static_cast<std::size_t>(n_param) + p] =
          (dp.points[i].x - dm.points[i].x) / (2.0 * fd_step);
      fd[(2 * i + 1) * static_cast<std::size_t>(n_param) + p] =
          (dp.points[i].y - dm.points[i].y) / (2.0 * fd_step);
    }
  }

  double scale = 1.0;
  for (double v : fd) scale = std::max(scale, std::abs(v));
  JacobianReport rep;
  for (std::size_t i = 0; i < fd.size(); ++i) {
    const double err = std::abs(recorded[i] - fd[i]);
    rep.max_abs_error = std::max(rep.max_abs_error, err);
    rep.max_rel_error = std::max(rep.max_rel_error, err / scale);
  }
  return rep;
}

}  // namespace trail
