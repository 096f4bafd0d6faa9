// Copyright 2026 The FACA Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>

#include "faca/error.hpp"

namespace faca {

/// Below this norm a vector has no usable direction.
inline constexpr double kNormEpsilon = 1e-9;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Planar vector. Used for positions (m), velocities (m/s) and forces.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) noexcept {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(Vec2 o) noexcept {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double k) noexcept {
    x *= k;
    y *= k;
    return *this;
  }

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) noexcept { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double k) noexcept { return {a.x * k, a.y * k}; }
  friend constexpr Vec2 operator*(double k, Vec2 a) noexcept { return {a.x * k, a.y * k}; }
  friend constexpr Vec2 operator/(Vec2 a, double k) noexcept { return {a.x / k, a.y / k}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) noexcept = default;
};

constexpr double dot(Vec2 a, Vec2 b) noexcept { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) noexcept { return a.x * b.y - a.y * b.x; }
constexpr double norm_sq(Vec2 v) noexcept { return dot(v, v); }
inline double norm(Vec2 v) noexcept { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) noexcept { return norm(a - b); }
inline bool is_finite(Vec2 v) noexcept { return std::isfinite(v.x) && std::isfinite(v.y); }

/// Wraps an angle into [0, 2pi).
inline double wrap_angle(double a) noexcept {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  // fmod of a tiny negative value can round up to exactly 2pi.
  if (w >= kTwoPi) w = 0.0;
  return w;
}

/// Position plus heading; heading is kept in [0, 2pi).
class Pose {
 public:
  Pose() = default;
  Pose(Vec2 position, double heading) : position_(position), heading_(wrap_angle(heading)) {}

  Vec2 position() const noexcept { return position_; }
  double heading() const noexcept { return heading_; }
  void set_position(Vec2 p) noexcept { position_ = p; }
  void set_heading(double h) noexcept { heading_ = wrap_angle(h); }

 private:
  Vec2 position_{};
  double heading_ = 0.0;
};

/// Applies the fixed quarter-turn matrix [[0, 1], [-1, 0]] (clockwise).
constexpr Vec2 rotate90(Vec2 v) noexcept { return {v.y, -v.x}; }

/// Counter-clockwise rotation by `angle` radians.
inline Vec2 rotate(Vec2 v, double angle) noexcept {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Unit vector along v. Throws NearZeroVector when |v| <= kNormEpsilon.
inline Vec2 normalize(Vec2 v) {
  const double n = norm(v);
  if (!(n > kNormEpsilon)) throw NearZeroVector{};
  return v / n;
}

/// Unit vector along v, or +x when v has no direction (coincident points).
inline Vec2 normalize_or_fallback(Vec2 v) noexcept {
  const double n = norm(v);
  if (!(n > kNormEpsilon)) return {1.0, 0.0};
  return v / n;
}

inline Vec2 from_polar(double length, double angle) noexcept {
  return {length * std::cos(angle), length * std::sin(angle)};
}

/// Heading of v in [0, 2pi); 0 for the zero vector.
inline double angle_of(Vec2 v) noexcept { return wrap_angle(std::atan2(v.y, v.x)); }

}  // namespace faca
