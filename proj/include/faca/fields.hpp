// Copyright 2026 The FACA Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

/// \file
/// Exponential potential fields with tangential ("roundabout") repulsion.
///
/// Attraction saturates at kappa_A far from the goal and fades smoothly to
/// zero at it. Repulsion between robots is the radial exponential force
/// turned a quarter turn clockwise, so two robots in conflict circulate
/// around each other instead of pushing head-on. The force on a robot is
/// scaled by the priority ratio so that the lower-priority robot deviates
/// more. Obstacles push along the tangent of their boundary.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "faca/error.hpp"
#include "faca/geometry.hpp"
#include "faca/prediction.hpp"
#include "faca/robot.hpp"

namespace faca {

/// Which way the priority ratio scales the repulsion felt by robot i.
enum class PriorityScaling {
  kYielding,  ///< rho_j / rho_i: the lower-priority robot feels the stronger push
  kLiteral,   ///< rho_i / rho_j
};

struct FieldParams {
  double kappa_A = 2.0;           ///< attractive gain
  double phi_A = -0.05;           ///< attractive spread, 1/m^2, < 0
  double kappa_R = 4.0;           ///< repulsive gain
  double phi_R = 0.25;            ///< repulsive spread, 1/m^2, > 0
  double subgoal_decay_c = 1.0;   ///< gap-subgoal spread, 1/m^2
  double blend_influence = 5.0;   ///< hazard distance at which blending stops, m
  double v_max = 15.0;            ///< m/s

  double safe_distance = 1.0;                           ///< conflict threshold and keep-out distance, m
  double arena_radius = std::numeric_limits<double>::infinity();  ///< workspace disc about the origin, m
  double horizon = kDefaultPredictionHorizon;           ///< conflict look-ahead, s
  PriorityScaling priority_scaling = PriorityScaling::kYielding;
  /// A robot in predicted conflict with a higher-priority robot cruises at
  /// v_max * clamp(1 - yield_gain * (1 - rho_i / rho_j), 0, 1).
  double yield_gain = 1.0;
  /// Cruise fraction while in predicted conflict with a robot of equal
  /// priority, i.e. when no right of way has been settled. 1 disables it.
  double caution_speed = 0.15;
  /// A robot keeps at least pacing_gap more remaining path than any
  /// higher-priority robot within pacing_radius, cruising at pacing_speed
  /// (a fraction of v_max) until it does. A radius of 0 disables pacing.
  double pacing_radius = 100.0;
  double pacing_gap = 3.0;
  double pacing_speed = 0.05;

  /// Throws ValidationError naming the first offending field.
  void validate() const {
    auto require = [](bool ok, const char* field, const char* what) {
      if (!ok) throw ValidationError(field, what);
    };
    require(kappa_A > 0.0, "kappa_A", "must be positive");
    require(phi_A < 0.0, "phi_A", "must be negative");
    require(kappa_R > 0.0, "kappa_R", "must be positive");
    require(phi_R > 0.0, "phi_R", "must be positive");
    require(subgoal_decay_c > 0.0, "subgoal_decay_c", "must be positive");
    require(blend_influence > 0.0, "blend_influence", "must be positive");
    require(v_max > 0.0, "v_max", "must be positive");
    require(safe_distance > 0.0, "safe_distance", "must be positive");
    require(horizon > 0.0, "horizon", "must be positive");
    require(arena_radius > 0.0, "arena_radius", "must be positive");
    require(yield_gain >= 0.0, "yield_gain", "must be non-negative");
    require(caution_speed >= 0.0 && caution_speed <= 1.0, "caution_speed", "must lie in [0, 1]");
    require(pacing_radius >= 0.0, "pacing_radius", "must be non-negative");
    require(pacing_gap >= 0.0, "pacing_gap", "must be non-negative");
    require(pacing_speed >= 0.0 && pacing_speed <= 1.0, "pacing_speed", "must lie in [0, 1]");
  }
};

struct CircularObstacle {
  Vec2 center;
  double radius = 1.0;
};

/// A vertical wall at x = wall_x with a single opening centred on gap_center.
struct WallGap {
  double wall_x = 0.0;
  Vec2 gap_center;
  double gap_width = 0.5;

  bool in_opening(double y) const noexcept { return std::abs(y - gap_center.y) <= 0.5 * gap_width; }
};

// --- attraction --------------------------------------------------------------

/// U_A(d) = kappa_A d - kappa_A sqrt(pi) / (2 sqrt(-phi_A)) erf(sqrt(-phi_A) d).
/// Only used to verify the force is its negative gradient.
inline double attractive_potential(Vec2 s, Vec2 g, const FieldParams& p) {
  const double d = distance(g, s);
  const double root = std::sqrt(-p.phi_A);
  return p.kappa_A * d - p.kappa_A * std::sqrt(std::numbers::pi) / (2.0 * root) * std::erf(root * d);
}

/// Saturating pull toward g with magnitude kappa_A (1 - exp(phi_A d^2)).
inline Vec2 attractive_force(Vec2 s, Vec2 g, const FieldParams& p) {
  const Vec2 to_goal = g - s;
  const double d = norm(to_goal);
  if (d <= kNormEpsilon) return {};
  const double magnitude = p.kappa_A * (1.0 - std::exp(p.phi_A * d * d));
  return to_goal * (magnitude / d);
}

// --- robot-robot repulsion ---------------------------------------------------

/// U_R(d) = -kappa_R sqrt(pi) / (2 sqrt(phi_R)) erf(sqrt(phi_R) d).
inline double repulsive_potential(double d_ij, const FieldParams& p) {
  const double root = std::sqrt(p.phi_R);
  return -p.kappa_R * std::sqrt(std::numbers::pi) / (2.0 * root) * std::erf(root * d_ij);
}

/// Radial repulsion magnitude kappa_R exp(-phi_R d^2), i.e. -dU_R/dd.
inline double radial_repulsion_magnitude(double d_ij, const FieldParams& p) {
  return p.kappa_R * std::exp(-p.phi_R * d_ij * d_ij);
}

inline double priority_factor(double rho_i, double rho_j, PriorityScaling scaling) {
  if (!(rho_i > 0.0) || !(rho_j > 0.0)) throw InvalidArgument("priorities must be positive");
  return scaling == PriorityScaling::kYielding ? rho_j / rho_i : rho_i / rho_j;
}

/// Force on robot i from robot j: the radial exponential repulsion rotated a
/// quarter turn clockwise and scaled by the priority ratio.
inline Vec2 tangential_repulsive_force(Vec2 s_i, Vec2 s_j, double rho_i, double rho_j,
                                       const FieldParams& p) {
  const Vec2 offset = s_i - s_j;
  const double d = norm(offset);
  const Vec2 unit = normalize_or_fallback(offset);
  const double magnitude = priority_factor(rho_i, rho_j, p.priority_scaling) * radial_repulsion_magnitude(d, p);
  return rotate90(unit) * magnitude;
}

// --- static obstacles --------------------------------------------------------

/// Slack allowed when deciding a point is inside an obstacle.
inline constexpr double kInsideTolerance = 1e-9;

inline double boundary_distance(Vec2 s, const CircularObstacle& obs) noexcept {
  return std::max(0.0, distance(s, obs.center) - obs.radius);
}

/// Push along the obstacle boundary tangent, on the side that agrees with
/// goal_dir (counter-clockwise on ties), with magnitude kappa_R exp(-phi_R b^2).
inline Vec2 obstacle_tangent_force(Vec2 s_i, const CircularObstacle& obs, Vec2 goal_dir, const FieldParams& p) {
  const Vec2 radial = s_i - obs.center;
  const double r = norm(radial);
  if (r < obs.radius - kInsideTolerance) {
    throw InsideObstacle("robot at (" + std::to_string(s_i.x) + ", " + std::to_string(s_i.y) +
                         ") is inside an obstacle");
  }
  const Vec2 unit = normalize_or_fallback(radial);
  const Vec2 ccw{-unit.y, unit.x};
  const Vec2 cw{unit.y, -unit.x};
  const Vec2 tangent = dot(cw, goal_dir) > dot(ccw, goal_dir) ? cw : ccw;
  const double b = std::max(0.0, r - obs.radius);
  return tangent * (p.kappa_R * std::exp(-p.phi_R * b * b));
}

// --- gap subgoal -------------------------------------------------------------

/// True once s lies strictly on the goal's side of the wall.
inline bool crossed_wall(Vec2 s, Vec2 goal, const WallGap& gap) noexcept {
  return (s.x - gap.wall_x) * (goal.x - gap.wall_x) > 0.0;
}

/// Pull toward the gap centre with magnitude kappa_A (1 - exp(-c |w - s|^2)).
inline Vec2 subgoal_attraction(Vec2 s_i, const WallGap& gap, const FieldParams& p) {
  const Vec2 to_gap = gap.gap_center - s_i;
  const double d = norm(to_gap);
  if (d <= kNormEpsilon) return {};
  const double magnitude = p.kappa_A * (1.0 - std::exp(-p.subgoal_decay_c * d * d));
  return to_gap * (magnitude / d);
}

/// True while robot s should still steer for the gap centre.
inline bool heading_for_gap(Vec2 s, Vec2 goal, const std::optional<WallGap>& gap) noexcept {
  return gap && !crossed_wall(s, goal, *gap) && distance(s, gap->gap_center) > kNormEpsilon;
}

/// The point robot s currently steers for: the gap centre until it has
/// crossed the wall, then its own goal.
inline Vec2 attraction_target(Vec2 s, Vec2 goal, const std::optional<WallGap>& gap) noexcept {
  return heading_for_gap(s, goal, gap) ? gap->gap_center : goal;
}

/// Path length still to travel, through the gap centre when one is pending.
inline double remaining_path(Vec2 s, Vec2 goal, const std::optional<WallGap>& gap) noexcept {
  if (heading_for_gap(s, goal, gap)) return distance(s, gap->gap_center) + distance(gap->gap_center, goal);
  return distance(s, goal);
}

/// Velocity the robot would take unobstructed: straight at its attraction
/// target at full speed.
inline Vec2 intended_velocity(const RobotState& r, const std::optional<WallGap>& gap, double v_max) noexcept {
  const Vec2 to_target = attraction_target(r.position, r.goal, gap) - r.position;
  const double d = norm(to_target);
  if (d <= kNormEpsilon) return {};
  return to_target * (std::min(v_max, r.v_max) / d);
}

// --- heading and velocity ----------------------------------------------------

/// Full-quadrant angle of the summed force, in [0, 2pi).
inline double compose_heading(Vec2 f_attr, Vec2 f_rep_total) {
  const Vec2 net = f_attr + f_rep_total;
  if (!(norm(net) > kNormEpsilon)) throw ZeroNetForce{};
  return angle_of(net);
}

inline Vec2 clamp_speed(Vec2 v, double v_max) noexcept {
  const double speed = norm(v);
  if (speed > v_max) return v * (v_max / speed);
  return v;
}

/// Blends the current velocity with the same speed re-aimed along theta_new.
/// beta = min(1, hazard distance / blend_influence) weights the current velocity.
inline Vec2 steer_velocity(Vec2 v_cur, double theta_new, double dist_nearest_hazard, const FieldParams& p) {
  const Vec2 candidate = from_polar(norm(v_cur), theta_new);
  const double beta = std::clamp(dist_nearest_hazard / p.blend_influence, 0.0, 1.0);
  return clamp_speed(v_cur * beta + candidate * (1.0 - beta), p.v_max);
}

/// Cruise fraction for a robot in predicted conflict with another: caution
/// when their priorities tie, proportional yielding to a higher priority,
/// otherwise full speed.
inline double conflict_speed_factor(double rho_self, double rho_other, const FieldParams& p) noexcept {
  const double ratio = rho_self / rho_other;
  if (std::abs(ratio - 1.0) <= 1e-9) return p.caution_speed;
  if (ratio > 1.0) return 1.0;
  return std::clamp(1.0 - p.yield_gain * (1.0 - ratio), 0.0, 1.0);
}

/// A limit dot(v, normal) <= bound on a velocity. Every constraint built
/// here has bound >= 0, so the zero velocity always satisfies all of them.
struct VelocityLimit {
  Vec2 normal;
  double bound = 0.0;
};

/// Moves v onto the set satisfying every limit: cyclic projections first,
/// then a uniform scale-down if any limit is still violated.
inline Vec2 enforce_limits(Vec2 v, std::span<const VelocityLimit> limits) noexcept {
  constexpr int kSweeps = 16;
  for (int sweep = 0; sweep < kSweeps; ++sweep) {
    bool changed = false;
    for (const VelocityLimit& c : limits) {
      const double excess = dot(v, c.normal) - c.bound;
      if (excess > 0.0) {
        v -= c.normal * excess;
        changed = true;
      }
    }
    if (!changed) return v;
  }
  double scale = 1.0;
  for (const VelocityLimit& c : limits) {
    const double along = dot(v, c.normal);
    if (along > c.bound) scale = std::min(scale, c.bound / along);
  }
  return v * scale;
}

/// The limit that stops velocity v from carrying a robot at s onto or
/// across the wall outside its opening, if it would.
inline std::optional<VelocityLimit> wall_limit(Vec2 s, Vec2 v, const WallGap& gap, double dt) noexcept {
  constexpr double kMargin = 1e-9;
  const Vec2 next = s + v * dt;
  const double a = s.x - gap.wall_x;
  const double b = next.x - gap.wall_x;
  if (a == 0.0 || (b != 0.0 && (a > 0.0) == (b > 0.0))) return std::nullopt;
  const double crossing_y = s.y + a / (a - b) * (next.y - s.y);
  if (gap.in_opening(crossing_y)) return std::nullopt;
  return VelocityLimit{{a > 0.0 ? -1.0 : 1.0, 0.0}, std::max(0.0, std::abs(a) - kMargin) / dt};
}

/// Limits that keep a robot at s from ending the tick closer than
/// safe_distance to any neighbour (assuming the neighbour applies the same
/// rule, each takes half the margin), outside every obstacle, inside the
/// arena, and from crossing the wall outside its opening.
inline std::vector<VelocityLimit> motion_limits(Vec2 s, Vec2 v, const RobotId& self_id,
                                                std::span<const RobotState> others,
                                                std::span<const CircularObstacle> obstacles,
                                                const std::optional<WallGap>& gap, const FieldParams& p, double dt) {
  std::vector<VelocityLimit> limits;
  for (const RobotState& other : others) {
    if (other.id == self_id) continue;
    const Vec2 offset = other.position - s;
    const double d = norm(offset);
    if (d <= kNormEpsilon) continue;
    limits.push_back({offset / d, std::max(0.0, d - p.safe_distance) / (2.0 * dt)});
  }
  for (const CircularObstacle& obs : obstacles) {
    const Vec2 offset = obs.center - s;
    const double d = norm(offset);
    if (d <= kNormEpsilon) continue;
    limits.push_back({offset / d, std::max(0.0, d - obs.radius) / dt});
  }
  const double reach = norm(s);
  if (std::isfinite(p.arena_radius) && reach > kNormEpsilon) {
    limits.push_back({s / reach, std::max(0.0, p.arena_radius - reach) / dt});
  }
  if (gap) {
    if (auto wall = wall_limit(s, v, *gap, dt)) limits.push_back(*wall);
  }
  return limits;
}

/// v moved onto every motion limit. The wall limit is re-checked after the
/// projection, which can shift the crossing point out of the opening.
inline Vec2 limited_velocity(Vec2 s, Vec2 v, const RobotId& self_id, std::span<const RobotState> others,
                             std::span<const CircularObstacle> obstacles, const std::optional<WallGap>& gap,
                             const FieldParams& p, double dt) {
  auto limits = motion_limits(s, v, self_id, others, obstacles, gap, p, dt);
  Vec2 out = enforce_limits(v, limits);
  if (gap) {
    if (auto wall = wall_limit(s, out, *gap, dt)) {
      limits.push_back(*wall);
      out = enforce_limits(out, limits);
    }
  }
  return out;
}

/// Below this fraction of the steered speed a robot counts as pinned.
inline constexpr double kBlockedFraction = 0.1;

struct StepCommand {
  Vec2 velocity;
  double heading = 0.0;
};

/// One planning decision for `self` against a frozen snapshot of the world.
///
/// `others` should hold only robots still moving; their priorities are read
/// relative to self.priority. The preferred velocity points at the current
/// attraction target at cruise speed; near hazards it is steered toward the
/// heading of the net field.
inline StepCommand faca_step(const RobotState& self, std::span<const RobotState> others,
                             std::span<const CircularObstacle> obstacles, const std::optional<WallGap>& gap,
                             const FieldParams& p, double dt) {
  const Vec2 s = self.position;
  const Vec2 target = attraction_target(s, self.goal, gap);
  const bool toward_gap = heading_for_gap(s, self.goal, gap);

  Vec2 f_attr = toward_gap ? subgoal_attraction(s, *gap, p) : attractive_force(s, target, p);
  Vec2 f_rep{};
  double hazard = std::numeric_limits<double>::infinity();
  const double full_speed = std::min(p.v_max, self.v_max);
  double cruise = full_speed;
  const Vec2 my_intent = intended_velocity(self, gap, p.v_max);
  const double my_remaining = remaining_path(s, self.goal, gap);
  for (const RobotState& other : others) {
    if (other.id == self.id) continue;
    const double d = distance(s, other.position);
    f_rep += tangential_repulsive_force(s, other.position, self.priority, other.priority, p);
    hazard = std::min(hazard, d);
    if (other.priority < self.priority) continue;
    const double other_remaining = remaining_path(other.position, other.goal, gap);
    const bool conflict = collision_imminent(s, my_intent, other.position, intended_velocity(other, gap, p.v_max),
                                             p.safe_distance, p.horizon);
    if (conflict) cruise = std::min(cruise, full_speed * conflict_speed_factor(self.priority, other.priority, p));
    if (other.priority > self.priority && d <= p.pacing_radius && my_remaining <= other_remaining + p.pacing_gap) {
      cruise = std::min(cruise, full_speed * p.pacing_speed);
    }
  }

  const Vec2 goal_dir = normalize_or_fallback(target - s);
  for (const CircularObstacle& obs : obstacles) {
    f_rep += obstacle_tangent_force(s, obs, goal_dir, p);
    hazard = std::min(hazard, boundary_distance(s, obs));
  }

  double heading = self.heading;
  try {
    heading = compose_heading(f_attr, f_rep);
  } catch (const ZeroNetForce&) {
    // keep the previous heading
  }

  const double to_goal = distance(self.goal, s);
  const double speed = std::min(cruise, to_goal / dt);
  const Vec2 preferred = norm(target - s) > kNormEpsilon ? goal_dir * speed : Vec2{};
  const Vec2 steered = steer_velocity(preferred, heading, hazard, p);
  Vec2 v = limited_velocity(s, steered, self.id, others, obstacles, gap, p, dt);
  // Pinned against a wall or neighbour by the field: try the plain
  // goal-directed velocity instead.
  if (norm(v) < kBlockedFraction * norm(steered)) {
    const Vec2 direct = limited_velocity(s, preferred, self.id, others, obstacles, gap, p, dt);
    if (norm(direct) > norm(v)) v = direct;
  }
  return {v, heading};
}

}  // namespace faca
