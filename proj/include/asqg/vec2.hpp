#pragma once

#include <cmath>

namespace asqg {

/// Point or displacement in the plane.
struct Vec2 {
  double x1 = 0.0;
  double x2 = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double a, double b) : x1(a), x2(b) {}

  constexpr Vec2& operator+=(Vec2 o) {
    x1 += o.x1;
    x2 += o.x2;
    return *this;
  }
  constexpr Vec2& operator-=(Vec2 o) {
    x1 -= o.x1;
    x2 -= o.x2;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x1 *= s;
    x2 *= s;
    return *this;
  }

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x1, -a.x2}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x1, s * a.x2}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x1, s * a.x2}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x1 * b.x1 + a.x2 * b.x2; }
constexpr double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::hypot(a.x1, a.x2); }

/// Rotation by +90 degrees: (z1, z2) -> (-z2, z1).
constexpr Vec2 perp(Vec2 z) { return {-z.x2, z.x1}; }

/// Mirror across the x1-axis, (x1, -x2).
constexpr Vec2 reflect_bar(Vec2 x) { return {x.x1, -x.x2}; }

/// Mirror across the x2-axis, (-x1, x2).
constexpr Vec2 reflect_tilde(Vec2 x) { return {-x.x1, x.x2}; }

inline bool is_finite(Vec2 a) { return std::isfinite(a.x1) && std::isfinite(a.x2); }

}  // namespace asqg
