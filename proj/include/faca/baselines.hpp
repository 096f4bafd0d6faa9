// Copyright 2026 The FACA Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

/// \file
/// Comparison planners: the classical quadratic/inverse-distance potential
/// field and a seeded sampling MPC.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>

#include "faca/error.hpp"
#include "faca/fields.hpp"
#include "faca/geometry.hpp"
#include "faca/robot.hpp"

namespace faca {

struct ClassicalApfParams {
  double eta_A = 1.0;       ///< attractive gain, 1/s
  double eta_R = 100.0;     ///< repulsive gain
  double sigma = 3.0;       ///< influence (safety) distance, m
  double speed_gain = 1.0;  ///< speed per unit force, capped at v_max

  void validate() const {
    if (!(eta_A > 0.0)) throw ValidationError("eta_A", "must be positive");
    if (!(eta_R > 0.0)) throw ValidationError("eta_R", "must be positive");
    if (!(sigma > 0.0)) throw ValidationError("sigma", "must be positive");
    if (!(speed_gain > 0.0)) throw ValidationError("speed_gain", "must be positive");
  }
};

/// Inverse-distance repulsion magnitude eta_R (1/d - 1/sigma) / d^2, zero
/// beyond sigma and capped at 1e3 * eta_R where it diverges.
inline double classical_repulsion_magnitude(double d, const ClassicalApfParams& p) noexcept {
  if (d >= p.sigma) return 0.0;
  const double cap = 1e3 * p.eta_R;
  if (d <= kNormEpsilon) return cap;
  return std::min(cap, p.eta_R * (1.0 / d - 1.0 / p.sigma) / (d * d));
}

/// Net classical force on self: eta_A (g - s) plus repulsion from every hazard
/// within sigma. Robot repulsion is scaled by rho_other / rho_self.
inline Vec2 classical_apf_force(const RobotState& self, std::span<const RobotState> others,
                                std::span<const CircularObstacle> obstacles, const ClassicalApfParams& p) {
  Vec2 force = (self.goal - self.position) * p.eta_A;
  for (const RobotState& other : others) {
    if (other.id == self.id) continue;
    const Vec2 away = self.position - other.position;
    const double d = norm(away);
    const double m = classical_repulsion_magnitude(d, p);
    if (m == 0.0) continue;
    force += normalize_or_fallback(away) * (m * priority_factor(self.priority, other.priority,
                                                                 PriorityScaling::kYielding));
  }
  for (const CircularObstacle& obs : obstacles) {
    const Vec2 away = self.position - obs.center;
    const double d = std::max(0.0, norm(away) - obs.radius);
    const double m = classical_repulsion_magnitude(d, p);
    if (m == 0.0) continue;
    force += normalize_or_fallback(away) * m;
  }
  return force;
}

/// Velocity along the classical force, speed min(|F| * speed_gain, v_max).
inline Vec2 classical_apf_step(const RobotState& self, std::span<const RobotState> others,
                               std::span<const CircularObstacle> obstacles, const ClassicalApfParams& p,
                               double dt) {
  const Vec2 force = classical_apf_force(self, others, obstacles, p);
  const double magnitude = norm(force);
  if (magnitude <= kNormEpsilon) return {};
  double speed = std::min(magnitude * p.speed_gain, self.v_max);
  // Do not step past the goal within one tick.
  speed = std::min(speed, distance(self.goal, self.position) / dt);
  return force * (speed / magnitude);
}

struct MpcParams {
  int horizon_steps = 10;
  int samples = 64;
  double collision_weight = 50.0;
  double goal_weight = 1.0;
  double safe_distance = 1.0;

  void validate() const {
    if (horizon_steps < 1) throw ValidationError("horizon_steps", "must be at least 1");
    if (samples < 1) throw ValidationError("samples", "must be at least 1");
    if (!(collision_weight > 0.0)) throw ValidationError("collision_weight", "must be positive");
    if (!(goal_weight > 0.0)) throw ValidationError("goal_weight", "must be positive");
    if (!(safe_distance > 0.0)) throw ValidationError("safe_distance", "must be positive");
  }
};

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double unit_uniform(std::mt19937_64& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Cost of holding velocity v for the whole horizon.
inline double mpc_rollout_cost(const RobotState& self, Vec2 v, std::span<const RobotState> others,
                               std::span<const CircularObstacle> obstacles, const MpcParams& p, double dt) {
  double penalty = 0.0;
  for (const RobotState& other : others) {
    if (other.id == self.id) continue;
    double closest = std::numeric_limits<double>::infinity();
    for (int h = 1; h <= p.horizon_steps; ++h) {
      const double t = h * dt;
      closest = std::min(closest, distance(self.position + v * t, other.position + other.velocity * t));
    }
    const double gap = std::max(0.0, p.safe_distance - closest);
    penalty += priority_factor(self.priority, other.priority, PriorityScaling::kYielding) * gap * gap;
  }
  for (const CircularObstacle& obs : obstacles) {
    double closest = std::numeric_limits<double>::infinity();
    for (int h = 1; h <= p.horizon_steps; ++h) {
      closest = std::min(closest, boundary_distance(self.position + v * (h * dt), obs));
    }
    const double gap = std::max(0.0, p.safe_distance - closest);
    penalty += gap * gap;
  }
  const Vec2 terminal = self.position + v * (p.horizon_steps * dt);
  return p.goal_weight * distance(self.goal, terminal) + p.collision_weight * penalty;
}

/// Sampling receding-horizon controller.
///
/// Candidate 0 holds position, candidate 1 heads straight for the goal at
/// full speed, the rest are drawn uniformly in speed and heading from a
/// generator seeded with rng_seed. The cheapest candidate wins; ties keep
/// the lowest index.
inline Vec2 mpc_step(const RobotState& self, std::span<const RobotState> others,
                     std::span<const CircularObstacle> obstacles, const MpcParams& p, double dt,
                     std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  const double v_max = self.v_max;
  Vec2 best{};
  double best_cost = std::numeric_limits<double>::infinity();
  for (int k = 0; k < p.samples; ++k) {
    Vec2 v;
    if (k == 0) {
      v = {};
    } else if (k == 1) {
      const Vec2 to_goal = self.goal - self.position;
      v = norm(to_goal) > kNormEpsilon ? normalize(to_goal) * std::min(v_max, norm(to_goal) / dt) : Vec2{};
    } else {
      const double speed = unit_uniform(rng) * v_max;
      const double heading = unit_uniform(rng) * kTwoPi;
      v = from_polar(speed, heading);
    }
    const double cost = mpc_rollout_cost(self, v, others, obstacles, p, dt);
    if (cost < best_cost) {
      best_cost = cost;
      best = v;
    }
  }
  return clamp_speed(best, v_max);
}

}  // namespace faca
