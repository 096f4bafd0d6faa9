// Copyright 2026 The FACA Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>

#include "faca/error.hpp"
#include "faca/geometry.hpp"

namespace faca {

/// Default look-ahead for straight-line conflict prediction, seconds.
inline constexpr double kDefaultPredictionHorizon = 5.0;

/// Relative speeds with squared norm below this are treated as parallel motion.
inline constexpr double kParallelEpsilon = 1e-12;

struct ApproachResult {
  double t_star = 0.0;  ///< time of closest approach in [0, horizon], s
  double d_min = 0.0;   ///< separation at t_star, m
};

/// Closest approach of two constant-velocity points within [0, horizon].
///
/// The squared separation is the quadratic |ds|^2 + 2 (ds.dv) t + |dv|^2 t^2;
/// its vertex is clamped into the horizon.
inline ApproachResult closest_approach(Vec2 s_i, Vec2 v_i, Vec2 s_j, Vec2 v_j, double horizon) {
  if (!(horizon > 0.0)) throw InvalidArgument("closest_approach: horizon must be positive");
  const Vec2 ds = s_i - s_j;
  const Vec2 dv = v_i - v_j;
  const double a = norm_sq(dv);
  if (a < kParallelEpsilon) return {0.0, norm(ds)};

  const double t = std::clamp(-dot(ds, dv) / a, 0.0, horizon);
  // Expanding the quadratic loses digits to cancellation near contact; the
  // offset form does not.
  return {t, norm(ds + dv * t)};
}

/// True iff the predicted closest approach is strictly below safe_distance.
inline bool collision_imminent(Vec2 s_i, Vec2 v_i, Vec2 s_j, Vec2 v_j, double safe_distance,
                               double horizon = kDefaultPredictionHorizon) {
  if (!(safe_distance > 0.0)) throw InvalidArgument("collision_imminent: safe_distance must be positive");
  return closest_approach(s_i, v_i, s_j, v_j, horizon).d_min < safe_distance;
}

}  // namespace faca
