// Copyright 2026 The FACA Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

/// \file
/// Synchronous simulation loop.
///
/// Every tick: apply due priority events, settle negotiations, open sessions
/// for newly conflicting pairs, plan every moving robot against the same
/// frozen snapshot, integrate, then mark arrivals. Arrived robots are frozen
/// and no longer act as repulsion sources.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "faca/baselines.hpp"
#include "faca/error.hpp"
#include "faca/fields.hpp"
#include "faca/negotiation.hpp"
#include "faca/prediction.hpp"
#include "faca/robot.hpp"
#include "faca/scenario.hpp"

namespace faca {

/// Slack used when comparing simulation times that are multiples of dt.
inline constexpr double kTimeEpsilon = 1e-9;

struct Snapshot {
  double t = 0.0;
  std::vector<RobotState> robots;  ///< same order as Scenario::robots
  std::vector<RobotPair> active_sessions;
};

struct NegotiationRecord {
  NegotiationSession session;
  double opened_at = 0.0;
  double resolved_at = 0.0;
};

struct TrajectoryLog {
  Scenario scenario;
  std::string scenario_digest;
  std::vector<Snapshot> snapshots;
  std::vector<std::optional<double>> arrivals;  ///< aligned with scenario.robots
  std::vector<NegotiationRecord> negotiations;
  std::map<RobotId, double> final_priorities;          ///< shared right-of-way priorities
  std::map<RobotId, double> final_mission_priorities;  ///< after every priority event
};

/// 64-bit FNV-1a, hex encoded.
inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string scenario_digest(const Scenario& sc) { return fnv1a_hex(to_json(sc).dump()); }

/// splitmix64 finaliser; mixes (seed, tick, robot) into an MPC sampling seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tick, std::uint64_t robot) noexcept {
  std::uint64_t z = seed ^ (tick * 0x9e3779b97f4a7c15ULL) ^ (robot * 0xbf58476d1ce4e5b9ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Keeps a step from passing through the wall outside its opening: the
/// x-motion is cancelled and the robot slides along the wall.
inline Vec2 constrain_to_wall(Vec2 from, Vec2 to, const WallGap& gap) noexcept {
  const double a = from.x - gap.wall_x;
  const double b = to.x - gap.wall_x;
  if (b == 0.0) return gap.in_opening(to.y) ? to : Vec2{from.x, to.y};
  if (a == 0.0 || (a > 0.0) == (b > 0.0)) return to;
  const double crossing_y = from.y + a / (a - b) * (to.y - from.y);
  return gap.in_opening(crossing_y) ? to : Vec2{from.x, to.y};
}

struct SimulationOptions {
  /// Chat service used when the scenario's negotiator is llm.
  ChatClient* chat = nullptr;
  LlmNegotiationOptions llm;
  /// Order in which robots are planned within a tick; empty means scenario
  /// order. The result must not depend on it.
  std::vector<std::size_t> evaluation_order;
};

class Simulation {
 public:
  explicit Simulation(Scenario scenario, SimulationOptions options = {})
      : sc_(std::move(scenario)), options_(std::move(options)) {
    sync_shared_params(sc_);
    validate(sc_);
    if (sc_.negotiator == NegotiatorKind::kLlm && options_.chat == nullptr) {
      throw InvalidArgument("llm negotiator selected but no chat client given");
    }
    robots_ = sc_.robots;
    for (RobotState& r : robots_) {
      r.mission.robot_id = r.id;
      r.arrived_at.reset();
      r.velocity = {};
    }
    if (options_.evaluation_order.empty()) {
      options_.evaluation_order.resize(robots_.size());
      std::iota(options_.evaluation_order.begin(), options_.evaluation_order.end(), std::size_t{0});
    } else if (options_.evaluation_order.size() != robots_.size()) {
      throw InvalidArgument("evaluation_order must list every robot once");
    }
    for (RobotState& r : robots_) {
      if (distance(r.position, r.goal) <= sc_.goal_tolerance) r.arrived_at = 0.0;
    }
    log_.scenario = sc_;
    log_.scenario_digest = scenario_digest(sc_);
    record_snapshot();
  }

  double time() const noexcept { return static_cast<double>(tick_) * sc_.dt; }
  std::int64_t tick() const noexcept { return tick_; }
  const std::vector<RobotState>& robots() const noexcept { return robots_; }
  const Scenario& scenario() const noexcept { return sc_; }

  bool finished() const noexcept {
    if (time() >= sc_.max_time - kTimeEpsilon) return true;
    for (const RobotState& r : robots_) {
      if (!r.arrived()) return false;
    }
    return true;
  }

  /// Advances the world by one tick.
  void step() {
    if (finished()) return;
    const double t = time();
    apply_events(t);
    resolve_due(t);
    open_sessions(t);
    resolve_due(t);

    std::vector<StepCommand> commands(robots_.size());
    for (std::size_t i : options_.evaluation_order) {
      if (!robots_[i].arrived()) commands[i] = plan(i);
    }
    integrate(commands);
    ++tick_;
    const double t_next = time();
    for (RobotState& r : robots_) {
      if (!r.arrived() && distance(r.position, r.goal) <= sc_.goal_tolerance) {
        r.arrived_at = t_next;
        r.velocity = {};
      }
    }
    record_snapshot();
  }

  /// Steps until every robot arrived or max_time elapsed.
  TrajectoryLog run() {
    while (!finished()) step();
    return log();
  }

  TrajectoryLog log() const {
    TrajectoryLog out = log_;
    out.arrivals.clear();
    for (const RobotState& r : robots_) {
      out.arrivals.push_back(r.arrived_at);
      out.final_priorities[r.id] = r.priority;
      out.final_mission_priorities[r.id] = r.mission.priority;
    }
    return out;
  }

 private:
  struct Pending {
    NegotiationSession session;
    double opened_at = 0.0;
    std::int64_t due_tick = 0;
  };

  std::size_t index_of(const RobotId& id) const {
    for (std::size_t i = 0; i < robots_.size(); ++i) {
      if (robots_[i].id == id) return i;
    }
    throw UnknownRobot("unknown robot " + id);
  }

  void record_snapshot() {
    Snapshot snap{time(), robots_, {}};
    for (const Pending& p : pending_) snap.active_sessions.push_back(p.session.pair);
    log_.snapshots.push_back(std::move(snap));
  }

  void apply_events(double t) {
    for (const PriorityEvent& e : sc_.priority_events) {
      if (!(e.at_time > t - sc_.dt + kTimeEpsilon && e.at_time <= t + kTimeEpsilon)) continue;
      for (const auto& [id, rho] : e.new_priorities) {
        RobotState& r = robots_[index_of(id)];
        r.mission.priority = rho;
        r.priority = rho;
        // Agreements involving this robot are settled again at once.
        for (const auto& [pair, agreement] : agreements_) {
          if (pair.first == id || pair.second == id) stale_.insert(pair);
        }
      }
    }
  }

  MissionContext context_of(const RobotState& r) const {
    MissionContext ctx = r.mission;
    ctx.robot_id = r.id;
    ctx.distance_to_goal = distance(r.position, r.goal);
    return ctx;
  }

  void open_sessions(double t) {
    if (sc_.negotiator == NegotiatorKind::kNone) return;
    struct Launched {
      std::size_t pending_index;
      std::future<NegotiationSession> result;
      std::chrono::steady_clock::time_point started;
    };
    std::vector<Launched> launched;

    for (std::size_t i = 0; i < robots_.size(); ++i) {
      for (std::size_t j = i + 1; j < robots_.size(); ++j) {
        const RobotState& a = robots_[i];
        const RobotState& b = robots_[j];
        if (a.arrived() || b.arrived() || registry_.is_open(a.id, b.id)) continue;
        const RobotPair pair = canonical_pair(a.id, b.id);
        const bool stale = stale_.erase(pair) > 0;
        if (!stale) {
          if (auto it = cooldown_until_.find(pair); it != cooldown_until_.end() && t < it->second - kTimeEpsilon) {
            continue;
          }
          if (!collision_imminent(a.position, intended_velocity(a, sc_.gap, sc_.field.v_max), b.position,
                                  intended_velocity(b, sc_.gap, sc_.field.v_max), sc_.safe_distance,
                                  sc_.field.horizon)) {
            continue;
          }
        }

        const MissionContext ctx_a = context_of(a);
        const MissionContext ctx_b = context_of(b);
        Pending p{registry_.open(ctx_a, ctx_b, sc_.negotiation.max_rounds), t, tick_};
        if (sc_.negotiator == NegotiatorKind::kScripted) {
          p.session.outcome = scripted_negotiate(ctx_a, ctx_b);
          p.due_tick = tick_ + latency_ticks(sc_.negotiation.scripted_latency);
          pending_.push_back(std::move(p));
        } else {
          ChatClient* chat = options_.chat;
          const LlmNegotiationOptions llm = options_.llm;
          NegotiationSession session = p.session;
          pending_.push_back(std::move(p));
          launched.push_back({pending_.size() - 1,
                              std::async(std::launch::async,
                                         [session, ctx_a, ctx_b, chat, llm]() mutable {
                                           llm_negotiate(session, ctx_a, ctx_b, *chat, llm);
                                           return session;
                                         }),
                              std::chrono::steady_clock::now()});
        }
      }
    }

    // The world is paused while replies are in flight; their wall-clock
    // latency is charged as simulated time before the outcome takes effect.
    for (Launched& l : launched) {
      Pending& p = pending_[l.pending_index];
      p.session = l.result.get();
      const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - l.started).count();
      p.due_tick = tick_ + latency_ticks(elapsed);
    }
  }

  std::int64_t latency_ticks(double seconds) const {
    return static_cast<std::int64_t>(std::ceil(seconds / sc_.dt - kTimeEpsilon));
  }

  void resolve_due(double t) {
    std::vector<Pending> still_pending;
    for (Pending& p : pending_) {
      if (p.due_tick > tick_) {
        still_pending.push_back(std::move(p));
        continue;
      }
      const PriorityAssignment& outcome = *p.session.outcome;
      std::map<RobotId, double> world;
      for (const RobotState& r : robots_) world[r.id] = r.priority;
      world = apply_assignment(std::move(world), outcome);
      for (RobotState& r : robots_) r.priority = world.at(r.id);

      agreements_[p.session.pair] = outcome;
      cooldown_until_[p.session.pair] = t + sc_.negotiation.cooldown;
      registry_.close(p.session.pair);
      log_.negotiations.push_back({std::move(p.session), p.opened_at, t});
    }
    pending_ = std::move(still_pending);
  }

  /// Priority of `other` as robot `self` believes it, relative to its own
  /// priority of 1: the ratio agreed in their last negotiation, or parity when
  /// they never negotiated.
  double believed_priority(const RobotState& self, const RobotState& other) const {
    auto it = agreements_.find(canonical_pair(self.id, other.id));
    if (it == agreements_.end()) return 1.0;
    const auto& rho = it->second.new_priorities;
    return rho.at(other.id) / rho.at(self.id);
  }

  StepCommand plan(std::size_t i) const {
    const RobotState& me = robots_[i];
    RobotState self = me;
    self.priority = 1.0;
    std::vector<RobotState> others;
    for (std::size_t j = 0; j < robots_.size(); ++j) {
      if (j == i || robots_[j].arrived()) continue;
      RobotState view = robots_[j];
      view.priority = believed_priority(me, robots_[j]);
      others.push_back(std::move(view));
    }

    switch (sc_.planner) {
      case PlannerKind::kFaca:
        return faca_step(self, others, sc_.obstacles, sc_.gap, sc_.field, sc_.dt);
      case PlannerKind::kClassicalApf: {
        const Vec2 v = classical_apf_step(self, others, sc_.obstacles, sc_.classical_apf, sc_.dt);
        return {v, norm(v) > kNormEpsilon ? angle_of(v) : me.heading};
      }
      case PlannerKind::kMpc: {
        const Vec2 v = mpc_step(self, others, sc_.obstacles, sc_.mpc, sc_.dt,
                                mix_seed(sc_.seed, static_cast<std::uint64_t>(tick_), i));
        return {v, norm(v) > kNormEpsilon ? angle_of(v) : me.heading};
      }
    }
    return {};
  }

  void integrate(const std::vector<StepCommand>& commands) {
    for (std::size_t i = 0; i < robots_.size(); ++i) {
      RobotState& r = robots_[i];
      if (r.arrived()) continue;
      Vec2 v = commands[i].velocity;
      if (!is_finite(v)) throw Error("non-finite velocity planned for " + r.id);
      Vec2 next = r.position + v * sc_.dt;
      if (sc_.gap) next = constrain_to_wall(r.position, next, *sc_.gap);
      for (const CircularObstacle& o : sc_.obstacles) {
        if (distance(next, o.center) < o.radius) {
          const Vec2 n = normalize_or_fallback(next - o.center);
          next = o.center + n * o.radius;
          v -= n * std::min(0.0, dot(v, n));
        }
      }
      const double reach = norm(next);
      if (reach > sc_.arena_radius) {
        const Vec2 n = next / reach;
        next = n * sc_.arena_radius;
        v -= n * std::max(0.0, dot(v, n));
      }
      r.velocity = (next - r.position) / sc_.dt;
      r.position = next;
      r.heading = wrap_angle(commands[i].heading);
    }
  }

  Scenario sc_;
  SimulationOptions options_;
  std::vector<RobotState> robots_;
  std::int64_t tick_ = 0;
  SessionRegistry registry_;
  std::vector<Pending> pending_;
  std::map<RobotPair, PriorityAssignment> agreements_;
  std::map<RobotPair, double> cooldown_until_;
  std::set<RobotPair> stale_;
  TrajectoryLog log_;
};

/// Runs a scenario to completion.
inline TrajectoryLog run(const Scenario& scenario, SimulationOptions options = {}) {
  return Simulation(scenario, std::move(options)).run();
}

}  // namespace faca
