#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace trail::ad {

// Minimal reverse-mode tape. Every recorded node has at most two parents with
// precomputed local partials, so the backward sweep is a single reverse loop.
// Vars with idx < 0 are constants and never touch the tape.

class Tape;

class Var {
 public:
  Var() = default;
  Var(double value) : v_(value) {}  // NOLINT: implicit constants are the point
  Var(double v, std::int32_t idx, Tape* tape) : v_(v), idx_(idx), tape_(tape) {}

  double value() const { return v_; }
  bool is_const() const { return idx_ < 0; }
  std::int32_t index() const { return idx_; }
  Tape* tape() const { return tape_; }

 private:
  double v_ = 0.0;
  std::int32_t idx_ = -1;
  Tape* tape_ = nullptr;
};

class Tape {
 public:
  void reserve(std::size_t n) { nodes_.reserve(n); }
  std::size_t size() const { return nodes_.size(); }

  // New leaf variable with an adjoint slot.
  Var input(double value) {
    nodes_.push_back({0.0, 0.0, -1, -1});
    return Var(value, static_cast<std::int32_t>(nodes_.size()) - 1, this);
  }

  Var unary(double value, const Var& a, double da) {
    if (a.is_const()) return Var(value);
    nodes_.push_back({da, 0.0, a.index(), -1});
    return Var(value, static_cast<std::int32_t>(nodes_.size()) - 1, a.tape());
  }

  Var binary(double value, const Var& a, double da, const Var& b, double db) {
    if (a.is_const() && b.is_const()) return Var(value);
    nodes_.push_back({da, db, a.index(), b.index()});
    Tape* t = a.is_const() ? b.tape() : a.tape();
    return Var(value, static_cast<std::int32_t>(nodes_.size()) - 1, t);
  }

  // Adjoint of every node with respect to `output`. Nodes are created in
  // topological order, so one reverse pass suffices.
  std::vector<double> gradient(const Var& output) const {
    std::vector<double> adj(nodes_.size(), 0.0);
    if (output.is_const()) return adj;
    adj[output.index()] = 1.0;
    for (std::int32_t i = output.index(); i >= 0; --i) {
      const double a = adj[i];
      if (a == 0.0) continue;
      const Node& n = nodes_[i];
      if (n.pa >= 0) adj[n.pa] += n.wa * a;
      if (n.pb >= 0) adj[n.pb] += n.wb * a;
    }
    return adj;
  }

  static double adjoint(const std::vector<double>& adj, const Var& v) {
    return v.is_const() ? 0.0 : adj[static_cast<std::size_t>(v.index())];
  }

 private:
  struct Node {
    double wa, wb;
    std::int32_t pa, pb;
  };
  std::vector<Node> nodes_;
};

namespace detail {
inline Tape* pick_tape(const Var& a, const Var& b) {
  return a.is_const() ? b.tape() : a.tape();
}
}  // namespace detail

// -- arithmetic --------------------------------------------------------------

inline Var operator+(const Var& a, const Var& b) {
  if (a.is_const() && b.is_const()) return Var(a.value() + b.value());
  return detail::pick_tape(a, b)->binary(a.value() + b.value(), a, 1.0, b, 1.0);
}

inline Var operator-(const Var& a, const Var& b) {
  if (a.is_const() && b.is_const()) return Var(a.value() - b.value());
  return detail::pick_tape(a, b)->binary(a.value() - b.value(), a, 1.0, b, -1.0);
}

inline Var operator-(const Var& a) {
  if (a.is_const()) return Var(-a.value());
  return a.tape()->unary(-a.value(), a, -1.0);
}

inline Var operator*(const Var& a, const Var& b) {
  if (a.is_const() && b.is_const()) return Var(a.value() * b.value());
  return detail::pick_tape(a, b)->binary(a.value() * b.value(), a, b.value(), b, a.value());
}

inline Var operator/(const Var& a, const Var& b) {
  const double q = a.value() / b.value();
  if (a.is_const() && b.is_const()) return Var(q);
  return detail::pick_tape(a, b)->binary(q, a, 1.0 / b.value(), b, -q / b.value());
}

inline Var& operator+=(Var& a, const Var& b) {
  a = a + b;
  return a;
}
inline Var& operator-=(Var& a, const Var& b) {
  a = a - b;
  return a;
}
inline Var& operator*=(Var& a, const Var& b) {
  a = a * b;
  return a;
}

inline bool operator<(const Var& a, const Var& b) { return a.value() < b.value(); }
inline bool operator>(const Var& a, const Var& b) { return a.value() > b.value(); }
inline bool operator<=(const Var& a, const Var& b) { return a.value() <= b.value(); }
inline bool operator>=(const Var& a, const Var& b) { return a.value() >= b.value(); }

// -- elementary functions ----------------------------------------------------

inline Var sqrt(const Var& a) {
  const double r = std::sqrt(a.value());
  if (a.is_const()) return Var(r);
  return a.tape()->unary(r, a, 0.5 / r);
}

inline Var exp(const Var& a) {
  const double e = std::exp(a.value());
  if (a.is_const()) return Var(e);
  return a.tape()->unary(e, a, e);
}

inline Var log(const Var& a) {
  const double l = std::log(a.value());
  if (a.is_const()) return Var(l);
  return a.tape()->unary(l, a, 1.0 / a.value());
}

inline Var log1p(const Var& a) {
  const double l = std::log1p(a.value());
  if (a.is_const()) return Var(l);
  return a.tape()->unary(l, a, 1.0 / (1.0 + a.value()));
}

inline Var sin(const Var& a) {
  const double s = std::sin(a.value());
  if (a.is_const()) return Var(s);
  return a.tape()->unary(s, a, std::cos(a.value()));
}

inline Var cos(const Var& a) {
  const double c = std::cos(a.value());
  if (a.is_const()) return Var(c);
  return a.tape()->unary(c, a, -std::sin(a.value()));
}

// Subgradient 0 at the kink, which matches symmetric finite differences there.
inline Var abs(const Var& a) {
  const double v = std::abs(a.value());
  if (a.is_const()) return Var(v);
  const double s = a.value() > 0.0 ? 1.0 : (a.value() < 0.0 ? -1.0 : 0.0);
  return a.tape()->unary(v, a, s);
}

inline Var fabs(const Var& a) { return abs(a); }

// Branch on value; derivative follows the selected operand.
inline Var min(const Var& a, const Var& b) { return a.value() <= b.value() ? a : b; }
inline Var max(const Var& a, const Var& b) { return a.value() >= b.value() ? a : b; }

// Integer power by repeated multiplication, used for the bumpiness exponent.
inline Var pow_int(const Var& a, int n) {
  Var r(1.0);
  for (int i = 0; i < n; ++i) r = r * a;
  return r;
}

// Records an external scalar sample f(x, y) with known partials (gx, gy).
// This is how terrain field queries enter the tape.
inline Var external_sample(const Var& x, const Var& y, double value, double gx, double gy) {
  if (x.is_const() && y.is_const()) return Var(value);
  return detail::pick_tape(x, y)->binary(value, x, gx, y, gy);
}

}  // namespace trail::ad

namespace trail {

// Lets templated math read scalar values for branching with either scalar type.
inline double value_of(double x) { return x; }
inline double value_of(const ad::Var& x) { return x.value(); }

inline double pow_int(double a, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= a;
  return r;
}

}  // namespace trail
