#pragma once

#include <algorithm>
#include <cmath>

namespace trail {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// 2-vectors and points share the representation.
using Vec2 = Point2;

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
inline Point2 operator*(Point2 p, double s) { return {s * p.x, s * p.y}; }
inline Point2& operator+=(Point2& a, Point2 b) {
  a.x += b.x;
  a.y += b.y;
  return a;
}

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double squared_norm(Vec2 v) { return v.x * v.x + v.y * v.y; }
inline double norm(Vec2 v) { return std::sqrt(squared_norm(v)); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

// Axis-aligned rectangle, also used as planning bounds.
struct Bounds {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  bool empty() const { return !(x_max > x_min) || !(y_max > y_min); }

  bool contains(Point2 p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }

  bool contains(const Bounds& inner) const {
    return inner.x_min >= x_min && inner.x_max <= x_max &&
           inner.y_min >= y_min && inner.y_max <= y_max;
  }

  Point2 clamp(Point2 p) const {
    return {std::clamp(p.x, x_min, x_max), std::clamp(p.y, y_min, y_max)};
  }
};

// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  a = std::fmod(a, two_pi);
  if (a <= -3.14159265358979323846) a += two_pi;
  if (a > 3.14159265358979323846) a -= two_pi;
  return a;
}

}  // namespace trail
