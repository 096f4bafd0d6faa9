// Copyright 2026 The FACA Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

/// \file
/// Evaluation quantities computed from a finished TrajectoryLog.

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "faca/engine.hpp"
#include "faca/error.hpp"

namespace faca {

struct TtgResult {
  std::map<RobotId, double> per_robot;
  double mean = 0.0;
  std::vector<RobotId> timeout_ids;
};

/// Arrival time per robot; robots that never arrived count as max_time.
inline TtgResult ttg(const TrajectoryLog& log) {
  TtgResult out;
  const auto& robots = log.scenario.robots;
  if (robots.empty()) return out;
  double sum = 0.0;
  for (std::size_t i = 0; i < robots.size(); ++i) {
    const std::optional<double> at = i < log.arrivals.size() ? log.arrivals[i] : std::nullopt;
    const double value = at.value_or(log.scenario.max_time);
    if (!at) out.timeout_ids.push_back(robots[i].id);
    out.per_robot[robots[i].id] = value;
    sum += value;
  }
  out.mean = sum / static_cast<double>(robots.size());
  return out;
}

/// Time of the last arrival, or max_time when anyone timed out.
inline double makespan(const TrajectoryLog& log) {
  double t = 0.0;
  for (const auto& at : log.arrivals) t = std::max(t, at.value_or(log.scenario.max_time));
  return t;
}

/// Mean over snapshots of the smallest separation among robots that have not
/// yet arrived. Snapshots with fewer than two such robots are skipped.
inline double mmd(const TrajectoryLog& log) {
  if (log.scenario.robots.size() < 2) throw TooFewRobots("mmd needs at least two robots");
  double sum = 0.0;
  std::size_t count = 0;
  for (const Snapshot& snap : log.snapshots) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < snap.robots.size(); ++i) {
      if (snap.robots[i].arrived()) continue;
      for (std::size_t j = i + 1; j < snap.robots.size(); ++j) {
        if (snap.robots[j].arrived()) continue;
        best = std::min(best, distance(snap.robots[i].position, snap.robots[j].position));
      }
    }
    if (best == std::numeric_limits<double>::infinity()) continue;
    sum += best;
    ++count;
  }
  if (count == 0) throw TooFewRobots("no snapshot has two active robots");
  return sum / static_cast<double>(count);
}

/// Mean over snapshots of the smallest robot-to-obstacle boundary distance;
/// empty when the scenario has no obstacles or no robot was ever active.
inline std::optional<double> mmd_obstacle(const TrajectoryLog& log) {
  if (log.scenario.obstacles.empty()) return std::nullopt;
  double sum = 0.0;
  std::size_t count = 0;
  for (const Snapshot& snap : log.snapshots) {
    double best = std::numeric_limits<double>::infinity();
    for (const RobotState& r : snap.robots) {
      if (r.arrived()) continue;
      for (const CircularObstacle& o : log.scenario.obstacles) best = std::min(best, boundary_distance(r.position, o));
    }
    if (best == std::numeric_limits<double>::infinity()) continue;
    sum += best;
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

/// Smallest pairwise separation over the whole run, arrived robots excluded.
inline double min_separation(const TrajectoryLog& log) {
  double best = std::numeric_limits<double>::infinity();
  for (const Snapshot& snap : log.snapshots) {
    for (std::size_t i = 0; i < snap.robots.size(); ++i) {
      if (snap.robots[i].arrived()) continue;
      for (std::size_t j = i + 1; j < snap.robots.size(); ++j) {
        if (snap.robots[j].arrived()) continue;
        best = std::min(best, distance(snap.robots[i].position, snap.robots[j].position));
      }
    }
  }
  return best;
}

/// Robots whose first and last recorded positions lie on opposite sides of
/// the wall line.
inline int count_wall_crossers(const TrajectoryLog& log, const WallGap& gap) {
  if (log.snapshots.empty()) return 0;
  const auto& first = log.snapshots.front().robots;
  const auto& last = log.snapshots.back().robots;
  int n = 0;
  for (std::size_t i = 0; i < first.size() && i < last.size(); ++i) {
    if ((first[i].position.x - gap.wall_x) * (last[i].position.x - gap.wall_x) < 0.0) ++n;
  }
  return n;
}

/// Agents per metre of opening per second of makespan.
inline double flow_rate(int crossers, double gap_width, double makespan_s) {
  if (!(makespan_s > 0.0)) throw ZeroMakespan("flow rate needs a positive makespan");
  if (!(gap_width > 0.0)) throw InvalidArgument("gap width must be positive");
  return static_cast<double>(crossers) / (gap_width * makespan_s);
}

inline double flow_rate(const TrajectoryLog& log, const WallGap& gap) {
  return flow_rate(count_wall_crossers(log, gap), gap.gap_width, makespan(log));
}

/// True when higher-priority robots arrived strictly earlier than every
/// lower-priority one. Priorities within `tie` are interchangeable.
inline bool fairness_match(const std::map<RobotId, double>& priorities, const std::map<RobotId, double>& arrivals,
                           double tie = kPriorityEpsilon) {
  for (const auto& [a, rho_a] : priorities) {
    for (const auto& [b, rho_b] : priorities) {
      if (rho_a > rho_b + tie && !(arrivals.at(a) < arrivals.at(b))) return false;
    }
  }
  return true;
}

/// Compares arrival order against the final mission priorities.
inline bool fairness_match(const TrajectoryLog& log) {
  const TtgResult t = ttg(log);
  if (!t.timeout_ids.empty()) throw Incomplete("fairness needs every robot to arrive; " + t.timeout_ids.front() + " timed out");
  return fairness_match(log.final_mission_priorities, t.per_robot);
}

struct MetricsReport {
  std::map<RobotId, double> ttg_per_robot;
  double ttg_mean = 0.0;
  double makespan = 0.0;
  std::optional<double> mmd_robot;
  std::optional<double> mmd_obstacle;
  std::optional<double> min_separation;
  std::optional<double> flow_rate;
  std::optional<bool> fairness_match;  ///< empty when a robot timed out
  std::vector<RobotId> timeout_ids;
  std::size_t negotiations = 0;
};

inline MetricsReport compute_metrics(const TrajectoryLog& log) {
  MetricsReport m;
  const TtgResult t = ttg(log);
  m.ttg_per_robot = t.per_robot;
  m.ttg_mean = t.mean;
  m.timeout_ids = t.timeout_ids;
  m.makespan = makespan(log);
  if (log.scenario.robots.size() >= 2) {
    try {
      m.mmd_robot = mmd(log);
    } catch (const TooFewRobots&) {
    }
    m.min_separation = min_separation(log);
  }
  m.mmd_obstacle = mmd_obstacle(log);
  if (log.scenario.gap && m.makespan > 0.0) m.flow_rate = flow_rate(log, *log.scenario.gap);
  if (t.timeout_ids.empty()) m.fairness_match = fairness_match(log);
  m.negotiations = log.negotiations.size();
  return m;
}

}  // namespace faca
