#pragma once

#include <cstddef>
#include <vector>

#include "trail/autodiff.hpp"
#include "trail/errors.hpp"
#include "trail/geometry.hpp"

namespace trail {

struct ControlPolygon {
  std::vector<Point2> points;
};

// Dense sampling of the spline, approximately uniform in arc length.
struct DensePath {
  std::vector<Point2> points;
  std::vector<double> seg_lengths;  // size points.size() - 1
  std::vector<double> curvatures;   // per point; endpoints copy their neighbor
  double total_length = 0.0;
};

// Signed Menger curvature of the circle through three points, zero when the
// points are (nearly) collinear or coincident. Positive turns left.
double menger_curvature(Point2 a, Point2 b, Point2 c);

// Centripetal Catmull-Rom through all control points, endpoint tangents from
// replicated endpoints, resampled to n_dense points uniform in arc length.
DensePath interpolate(const ControlPolygon& ctrl, int n_dense, int fine_per_segment = 0);

// Curve position at each control knot; these must reproduce the control
// points themselves.
std::vector<Point2> evaluate_at_knots(const ControlPolygon& ctrl);

struct JacobianReport {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
};

// Compares the recorded derivative of every dense point with respect to every
// interior control point against central finite differences of interpolate().
JacobianReport path_jacobian_check(const ControlPolygon& ctrl, int n_dense,
                                   double fd_step = 1e-6);

namespace detail {

template <class S>
struct P2 {
  S x, y;
};

template <class S>
P2<S> lerp_delta(const P2<S>& a, const P2<S>& b, const S& u) {
  // a + u*(b - a); the delta form stays exact when a and b coincide, which
  // happens at the replicated endpoints where the knot interval is epsilon.
  return {a.x + u * (b.x - a.x), a.y + u * (b.y - a.y)};
}

template <class S>
S chord_knot_step(const P2<S>& a, const P2<S>& b) {
  using std::sqrt;
  using ad::sqrt;
  const S d2 = (b.x - a.x) * (b.x - a.x) + (b.y - a.y) * (b.y - a.y);
  // Centripetal parameterization: dt = chord^(1/2) = (dx^2+dy^2)^(1/4).
  if (value_of(d2) < 1e-36) return S(1e-9);
  return sqrt(sqrt(d2));
}

// Extended control points (replicated endpoints) and their knots.
template <class S>
struct SplineSupport {
  std::vector<P2<S>> pts;  // m + 2 entries
  std::vector<S> knots;    // m + 2 entries, knots[j] parameterizes pts[j]
  int segments = 0;        // m - 1

  // Barry-Goldman evaluation on user segment `seg` (0-based), t inside
  // [knots[seg+1], knots[seg+2]].
  P2<S> eval(int seg, const S& t) const {
    const P2<S>* p = &pts[seg];
    const S* k = &knots[seg];
    const S u01 = (t - k[0]) / (k[1] - k[0]);
    const S u12 = (t - k[1]) / (k[2] - k[1]);
    const S u23 = (t - k[2]) / (k[3] - k[2]);
    const S u02 = (t - k[0]) / (k[2] - k[0]);
    const S u13 = (t - k[1]) / (k[3] - k[1]);
    const P2<S> a1 = lerp_delta(p[0], p[1], u01);
    const P2<S> a2 = lerp_delta(p[1], p[2], u12);
    const P2<S> a3 = lerp_delta(p[2], p[3], u23);
    const P2<S> b1 = lerp_delta(a1, a2, u02);
    const P2<S> b2 = lerp_delta(a2, a3, u13);
    return lerp_delta(b1, b2, u12);
  }
};

template <class S>
SplineSupport<S> make_support(const std::vector<P2<S>>& ctrl) {
  const int m = static_cast<int>(ctrl.size());
  if (m < 2) throw TooFewPoints("spline needs at least two control points");
  SplineSupport<S> s;
  s.segments = m - 1;
  s.pts.reserve(m + 2);
  s.pts.push_back(ctrl.front());
  for (const auto& p : ctrl) s.pts.push_back(p);
  s.pts.push_back(ctrl.back());
  s.knots.resize(m + 2);
  s.knots[0] = S(0.0);
  for (int j = 0; j + 1 < m + 2; ++j) {
    s.knots[j + 1] = s.knots[j] + chord_knot_step(s.pts[j], s.pts[j + 1]);
  }
  return s;
}

template <class S>
S menger(const P2<S>& a, const P2<S>& b, const P2<S>& c) {
  using std::sqrt;
  using ad::sqrt;
  const S d1x = b.x - a.x, d1y = b.y - a.y;
  const S d2x = c.x - b.x, d2y = c.y - b.y;
  const S d3x = c.x - a.x, d3y = c.y - a.y;
  const S n1sq = d1x * d1x + d1y * d1y;
  const S n2sq = d2x * d2x + d2y * d2y;
  const S n3sq = d3x * d3x + d3y * d3y;
  constexpr double eps2 = 1e-24;
  if (value_of(n1sq) < eps2 || value_of(n2sq) < eps2 || value_of(n3sq) < eps2) {
    return S(0.0);
  }
  const S crossv = d1x * d2y - d1y * d2x;
  return (2.0 * crossv) / (sqrt(n1sq) * sqrt(n2sq) * sqrt(n3sq));
}

template <class S>
struct DenseChain {
  std::vector<P2<S>> pts;
  std::vector<S> seg_len;
  std::vector<S> curvature;  // endpoints copy their neighbor
  S total;
};

inline int auto_fine_per_segment(int n_dense, int segments) {
  const int by_density = (4 * n_dense + segments - 1) / segments;
  return by_density < 8 ? 8 : by_density;
}

// Two passes: parameter-uniform sampling per segment, then re-sampling at
// uniform arc-length targets along the resulting polyline. Everything is a
// function of the control points, including the re-sampled parameters, so the
// recorded derivatives cover the full chain.
template <class S>
DenseChain<S> build_dense_chain(const std::vector<P2<S>>& ctrl, int n_dense,
                                int fine_per_segment = 0) {
  using std::sqrt;
  using ad::sqrt;
  if (n_dense < 2) throw TooFewPoints("dense sampling needs at least two points");
  const SplineSupport<S> sup = make_support(ctrl);
  const int segs = sup.segments;
  const int fine = fine_per_segment > 0 ? fine_per_segment : auto_fine_per_segment(n_dense, segs);

  const int n_fine = segs * fine + 1;
  std::vector<S> fine_t;
  std::vector<int> seg_of(n_fine);
  fine_t.reserve(n_fine);
  for (int j = 0; j < segs; ++j) {
    const S t0 = sup.knots[j + 1];
    const S dt = sup.knots[j + 2] - sup.knots[j + 1];
    for (int f = 0; f < fine; ++f) {
      seg_of[fine_t.size()] = j;
      fine_t.push_back(t0 + dt * (static_cast<double>(f) / fine));
    }
  }
  seg_of[fine_t.size()] = segs - 1;
  fine_t.push_back(sup.knots[segs + 1]);

  std::vector<P2<S>> fine_p(n_fine);
  for (int k = 0; k < n_fine; ++k) fine_p[k] = sup.eval(seg_of[k], fine_t[k]);

  std::vector<S> cum(n_fine);
  cum[0] = S(0.0);
  for (int k = 1; k < n_fine; ++k) {
    const S dx = fine_p[k].x - fine_p[k - 1].x;
    const S dy = fine_p[k].y - fine_p[k - 1].y;
    cum[k] = cum[k - 1] + sqrt(dx * dx + dy * dy + 1e-32);
  }
  const S total = cum[n_fine - 1];

  DenseChain<S> out;
  out.pts.resize(n_dense);
  out.pts[0] = sup.eval(0, sup.knots[1]);
  out.pts[n_dense - 1] = sup.eval(segs - 1, sup.knots[segs + 1]);
  int k = 0;
  for (int i = 1; i + 1 < n_dense; ++i) {
    const S target = total * (static_cast<double>(i) / (n_dense - 1));
    while (k + 2 < n_fine && value_of(cum[k + 1]) < value_of(target)) ++k;
    const S den = cum[k + 1] - cum[k];
    S t = fine_t[k];
    if (value_of(den) > 1e-30) {
      const S theta = (target - cum[k]) / den;
      t = fine_t[k] + theta * (fine_t[k + 1] - fine_t[k]);
    }
    out.pts[i] = sup.eval(seg_of[k], t);
  }

  out.seg_len.resize(n_dense - 1);
  out.total = S(0.0);
  for (int i = 0; i + 1 < n_dense; ++i) {
    const S dx = out.pts[i + 1].x - out.pts[i].x;
    const S dy = out.pts[i + 1].y - out.pts[i].y;
    out.seg_len[i] = sqrt(dx * dx + dy * dy + 1e-32);
    out.total += out.seg_len[i];
  }

  out.curvature.resize(n_dense);
  for (int i = 1; i + 1 < n_dense; ++i) {
    out.curvature[i] = menger(out.pts[i - 1], out.pts[i], out.pts[i + 1]);
  }
  out.curvature[0] = n_dense > 2 ? out.curvature[1] : S(0.0);
  out.curvature[n_dense - 1] = n_dense > 2 ? out.curvature[n_dense - 2] : S(0.0);
  return out;
}

}  // namespace detail

}  // namespace trail
