// Copyright 2026 The FACA Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "faca/baselines.hpp"
#include "faca/error.hpp"
#include "faca/fields.hpp"
#include "faca/geometry.hpp"
#include "faca/robot.hpp"

namespace faca {

inline constexpr int kFormatVersion = 1;

enum class PlannerKind { kFaca, kClassicalApf, kMpc };
enum class NegotiatorKind { kNone, kScripted, kLlm };

inline std::string to_string(PlannerKind k) {
  switch (k) {
    case PlannerKind::kFaca: return "faca";
    case PlannerKind::kClassicalApf: return "classical_apf";
    case PlannerKind::kMpc: return "mpc";
  }
  return "?";
}

inline std::string to_string(NegotiatorKind k) {
  switch (k) {
    case NegotiatorKind::kNone: return "none";
    case NegotiatorKind::kScripted: return "scripted";
    case NegotiatorKind::kLlm: return "llm";
  }
  return "?";
}

inline PlannerKind parse_planner(const std::string& s) {
  if (s == "faca") return PlannerKind::kFaca;
  if (s == "classical_apf") return PlannerKind::kClassicalApf;
  if (s == "mpc") return PlannerKind::kMpc;
  throw ValidationError("planner", "unknown planner '" + s + "' (expected faca, classical_apf or mpc)");
}

inline NegotiatorKind parse_negotiator(const std::string& s) {
  if (s == "none") return NegotiatorKind::kNone;
  if (s == "scripted") return NegotiatorKind::kScripted;
  if (s == "llm") return NegotiatorKind::kLlm;
  throw ValidationError("negotiator", "unknown negotiator '" + s + "' (expected none, scripted or llm)");
}

struct PriorityEvent {
  double at_time = 0.0;
  std::map<RobotId, double> new_priorities;
};

struct NegotiationSettings {
  int max_rounds = 3;
  double cooldown = 2.0;          ///< s before a resolved pair may negotiate again
  double scripted_latency = 0.0;  ///< simulated s between opening and resolving a scripted session
};

enum class Layout { kArc, kHeadOn };

/// Parameters of the circular benchmark layouts. A scenario that carries one
/// is re-instantiated for every seed of a batch.
struct CircleSpec {
  Layout layout = Layout::kArc;
  int n = 4;
  double arena_radius = 50.0;
  double arc = std::numbers::pi / 16.0;  ///< angular span of the start positions, rad
  std::optional<double> gap_width;       ///< walls at x = 0 with a centred opening
  std::optional<double> obstacle_radius; ///< obstacle at the arena centre
  bool priority_event = true;
  /// Time of the priority permutation; nullopt places it at the default point.
  std::optional<double> event_time;
};

struct Scenario {
  std::string name = "scenario";
  std::vector<RobotState> robots;
  std::vector<CircularObstacle> obstacles;
  std::optional<WallGap> gap;
  double arena_radius = 50.0;
  double dt = 0.05;
  double max_time = 40.0;
  double goal_tolerance = 0.5;
  double safe_distance = 1.0;
  std::vector<PriorityEvent> priority_events;
  PlannerKind planner = PlannerKind::kFaca;
  NegotiatorKind negotiator = NegotiatorKind::kScripted;
  std::uint64_t seed = 0;

  FieldParams field;
  ClassicalApfParams classical_apf;
  MpcParams mpc;
  NegotiationSettings negotiation;

  std::optional<CircleSpec> generator;
};

/// Copies scenario-wide values the planners also need.
inline void sync_shared_params(Scenario& sc) noexcept {
  sc.field.safe_distance = sc.safe_distance;
  sc.field.arena_radius = sc.arena_radius;
  sc.mpc.safe_distance = sc.safe_distance;
}

/// Throws ValidationError naming the first offending field.
inline void validate(const Scenario& sc) {
  if (!(sc.dt > 0.0)) throw ValidationError("dt", "must be positive");
  if (!(sc.max_time > 0.0)) throw ValidationError("max_time", "must be positive");
  if (!(sc.arena_radius > 0.0)) throw ValidationError("arena_radius", "must be positive");
  if (!(sc.goal_tolerance > 0.0)) throw ValidationError("goal_tolerance", "must be positive");
  if (!(sc.safe_distance > 0.0)) throw ValidationError("safe_distance", "must be positive");
  if (sc.robots.empty()) throw ValidationError("robots", "at least one robot is required");
  sc.field.validate();
  sc.classical_apf.validate();
  sc.mpc.validate();
  if (sc.negotiation.max_rounds < 1) throw ValidationError("negotiation.max_rounds", "must be at least 1");
  if (sc.negotiation.cooldown < 0.0) throw ValidationError("negotiation.cooldown", "must be non-negative");
  if (sc.negotiation.scripted_latency < 0.0) {
    throw ValidationError("negotiation.scripted_latency", "must be non-negative");
  }

  std::set<RobotId> ids;
  for (const RobotState& r : sc.robots) {
    if (r.id.empty()) throw ValidationError("robots.id", "must not be empty");
    if (!ids.insert(r.id).second) throw ValidationError("robots.id", "duplicate id " + r.id);
    if (!is_finite(r.position) || !is_finite(r.goal)) throw ValidationError("robots." + r.id, "non-finite coordinate");
    if (!(r.priority > 0.0)) throw ValidationError("robots." + r.id + ".priority", "must be positive");
    if (!(r.v_max > 0.0)) throw ValidationError("robots." + r.id + ".v_max", "must be positive");
    for (const CircularObstacle& o : sc.obstacles) {
      if (distance(r.position, o.center) < o.radius) {
        throw ValidationError("robots." + r.id + ".start", "inside an obstacle");
      }
    }
  }
  for (std::size_t i = 0; i < sc.robots.size(); ++i) {
    for (std::size_t j = i + 1; j < sc.robots.size(); ++j) {
      if (distance(sc.robots[i].position, sc.robots[j].position) < sc.safe_distance) {
        throw ValidationError("robots", "starts of " + sc.robots[i].id + " and " + sc.robots[j].id +
                                            " are closer than safe_distance");
      }
    }
  }
  for (const CircularObstacle& o : sc.obstacles) {
    if (!(o.radius > 0.0)) throw ValidationError("obstacles.radius", "must be positive");
  }
  if (sc.gap) {
    if (!(sc.gap->gap_width > 0.0)) throw ValidationError("gap.gap_width", "must be positive");
    if (sc.gap->gap_center.x != sc.gap->wall_x) throw ValidationError("gap.gap_center", "must lie on the wall line");
  }
  for (const PriorityEvent& e : sc.priority_events) {
    if (!(e.at_time >= 0.0)) throw ValidationError("priority_events.at_time", "must be non-negative");
    for (const auto& [id, rho] : e.new_priorities) {
      if (!ids.contains(id)) throw ValidationError("priority_events", "unknown robot " + id);
      if (!(rho > 0.0)) throw ValidationError("priority_events", "priority for " + id + " must be positive");
    }
  }
}

// --- seeded draws --------------------------------------------------------------

/// Mean and spread of the initial priority draw, and its lower cut-off.
inline constexpr double kPriorityMean = 3.0;
inline constexpr double kPriorityStddev = 1.0;
inline constexpr double kPriorityFloor = 0.5;

/// Standard normal via Box-Muller on platform-independent uniforms.
inline double standard_normal(std::mt19937_64& rng) {
  double u1 = 0.0;
  while (u1 <= 0.0) u1 = unit_uniform(rng);
  const double u2 = unit_uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

inline double draw_priority(std::mt19937_64& rng) {
  for (;;) {
    const double rho = kPriorityMean + kPriorityStddev * standard_normal(rng);
    if (rho >= kPriorityFloor) return rho;
  }
}

/// Fisher-Yates with the portable uniform.
template <class T>
void shuffle_portable(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(i));
    std::swap(v[i - 1], v[std::min(j, i - 1)]);
  }
}

inline std::string robot_name(int k) { return "robot_" + std::to_string(k); }

inline const char* mission_for(int k) {
  static const char* kMissions[] = {
      "Transporting a critical patient to City General Hospital.",
      "Delivering a ventilator for an emergency surgery.",
      "Delivering food and water supplies to a shelter.",
      "Surveying the area for structural damage.",
      "Carrying medicine to a field clinic.",
      "Relaying communications for the rescue team.",
      "Transporting spare batteries to the staging area.",
      "Mapping the blocked roads for the evacuation route.",
  };
  return kMissions[k % 8];
}

/// Fraction of the nominal crossing time at which the arc layout's
/// priority permutation fires by default.
inline constexpr double kDefaultEventFraction = 0.5;

/// Builds a benchmark scenario on a circle of radius spec.arena_radius.
///
/// Arc layout: n starts spread evenly over an arc of spec.arc radians centred
/// on the negative x-axis, goals antipodal, priorities drawn from a normal
/// (mean 3, sd 1, redrawn below 0.5) and one seeded permutation of them at
/// the event time. Head-on layout: two equal-priority robots swapping ends of
/// a seed-chosen axis-aligned diameter.
inline Scenario make_circle_scenario(const CircleSpec& spec, std::uint64_t seed, Scenario base = {}) {
  if (spec.n < 1) throw ValidationError("n", "must be at least 1");
  std::mt19937_64 rng(seed);
  Scenario sc = std::move(base);
  sc.seed = seed;
  sc.arena_radius = spec.arena_radius;
  sc.generator = spec;
  sc.robots.clear();
  sc.obstacles.clear();
  sc.priority_events.clear();
  sc.gap.reset();
  const double R = spec.arena_radius;

  auto add_robot = [&](int k, double angle, double priority) {
    RobotState r;
    r.id = robot_name(k);
    r.position = from_polar(R, angle);
    r.goal = -r.position;
    r.priority = priority;
    r.v_max = sc.field.v_max;
    r.heading = angle_of(r.goal - r.position);
    r.mission = {r.id, mission_for(k), priority, 2.0 * R, std::nullopt};
    sc.robots.push_back(std::move(r));
  };

  if (spec.layout == Layout::kHeadOn) {
    // Axis-aligned so that the pair is exactly symmetric in floating point.
    static constexpr Vec2 kAxes[] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    const Vec2 axis = kAxes[rng() % 4];
    add_robot(0, 0.0, kPriorityMean);
    add_robot(1, 0.0, kPriorityMean);
    sc.robots[0].position = axis * R;
    sc.robots[1].position = axis * -R;
    for (RobotState& r : sc.robots) {
      r.goal = -r.position;
      r.heading = angle_of(r.goal - r.position);
    }
  } else {
    std::vector<double> priorities;
    for (int k = 0; k < spec.n; ++k) priorities.push_back(draw_priority(rng));
    for (int k = 0; k < spec.n; ++k) {
      const double offset = spec.n == 1 ? 0.0 : -0.5 * spec.arc + spec.arc * k / (spec.n - 1);
      add_robot(k, std::numbers::pi + offset, priorities[static_cast<std::size_t>(k)]);
    }
    if (spec.priority_event && spec.n > 1) {
      std::vector<double> permuted = priorities;
      shuffle_portable(permuted, rng);
      PriorityEvent event;
      const double nominal = 2.0 * R / sc.field.v_max;
      event.at_time = spec.event_time.value_or(kDefaultEventFraction * nominal);
      for (int k = 0; k < spec.n; ++k) event.new_priorities[robot_name(k)] = permuted[static_cast<std::size_t>(k)];
      sc.priority_events.push_back(std::move(event));
    }
  }

  if (spec.gap_width) sc.gap = WallGap{0.0, {0.0, 0.0}, *spec.gap_width};
  if (spec.obstacle_radius) sc.obstacles.push_back({{0.0, 0.0}, *spec.obstacle_radius});
  sync_shared_params(sc);
  return sc;
}

/// Re-instantiates a generated scenario for another seed; explicit scenarios
/// only change their seed.
inline Scenario reseed(const Scenario& sc, std::uint64_t seed) {
  if (sc.generator) return make_circle_scenario(*sc.generator, seed, sc);
  Scenario out = sc;
  out.seed = seed;
  return out;
}

// --- JSON ------------------------------------------------------------------------

namespace json_detail {

using nlohmann::json;

inline json vec(Vec2 v) { return json::array({v.x, v.y}); }

inline Vec2 vec(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ValidationError(field, "expected [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

template <class T>
T get(const json& j, const char* key, const std::string& prefix, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(prefix + key, "has the wrong type");
  }
}

template <class T>
T require(const json& j, const char* key, const std::string& prefix) {
  if (!j.contains(key)) throw ValidationError(prefix + key, "is required");
  return get<T>(j, key, prefix, T{});
}

}  // namespace json_detail

inline nlohmann::json field_params_to_json(const FieldParams& p) {
  return {{"kappa_A", p.kappa_A},
          {"phi_A", p.phi_A},
          {"kappa_R", p.kappa_R},
          {"phi_R", p.phi_R},
          {"subgoal_decay_c", p.subgoal_decay_c},
          {"blend_influence", p.blend_influence},
          {"v_max", p.v_max},
          {"horizon", p.horizon},
          {"priority_scaling", p.priority_scaling == PriorityScaling::kYielding ? "yielding" : "literal"},
          {"yield_gain", p.yield_gain},
          {"caution_speed", p.caution_speed},
          {"pacing_radius", p.pacing_radius},
          {"pacing_gap", p.pacing_gap},
          {"pacing_speed", p.pacing_speed}};
}

inline nlohmann::json to_json(const Scenario& sc) {
  using json_detail::vec;
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["name"] = sc.name;
  j["arena_radius"] = sc.arena_radius;
  j["dt"] = sc.dt;
  j["max_time"] = sc.max_time;
  j["goal_tolerance"] = sc.goal_tolerance;
  j["safe_distance"] = sc.safe_distance;
  j["planner"] = to_string(sc.planner);
  j["negotiator"] = to_string(sc.negotiator);
  j["seed"] = sc.seed;
  j["field"] = field_params_to_json(sc.field);
  j["classical_apf"] = {{"eta_A", sc.classical_apf.eta_A},
                        {"eta_R", sc.classical_apf.eta_R},
                        {"sigma", sc.classical_apf.sigma},
                        {"speed_gain", sc.classical_apf.speed_gain}};
  j["mpc"] = {{"horizon_steps", sc.mpc.horizon_steps},
              {"samples", sc.mpc.samples},
              {"collision_weight", sc.mpc.collision_weight},
              {"goal_weight", sc.mpc.goal_weight}};
  j["negotiation"] = {{"max_rounds", sc.negotiation.max_rounds},
                      {"cooldown", sc.negotiation.cooldown},
                      {"scripted_latency", sc.negotiation.scripted_latency}};
  if (sc.generator) {
    const CircleSpec& g = *sc.generator;
    nlohmann::json gen{{"layout", g.layout == Layout::kArc ? "arc" : "head_on"},
                       {"n", g.n},
                       {"arena_radius", g.arena_radius},
                       {"arc", g.arc},
                       {"priority_event", g.priority_event}};
    if (g.gap_width) gen["gap_width"] = *g.gap_width;
    if (g.obstacle_radius) gen["obstacle_radius"] = *g.obstacle_radius;
    if (g.event_time) gen["event_time"] = *g.event_time;
    j["generator"] = gen;
  }
  j["robots"] = nlohmann::json::array();
  for (const RobotState& r : sc.robots) {
    nlohmann::json rj{{"id", r.id},
                      {"start", vec(r.position)},
                      {"goal", vec(r.goal)},
                      {"priority", r.priority},
                      {"v_max", r.v_max},
                      {"mission", r.mission.mission_text}};
    if (r.mission.urgency_note) rj["urgency"] = *r.mission.urgency_note;
    j["robots"].push_back(rj);
  }
  j["obstacles"] = nlohmann::json::array();
  for (const CircularObstacle& o : sc.obstacles) j["obstacles"].push_back({{"center", vec(o.center)}, {"radius", o.radius}});
  j["gap"] = sc.gap ? nlohmann::json{{"wall_x", sc.gap->wall_x},
                                     {"gap_center", vec(sc.gap->gap_center)},
                                     {"gap_width", sc.gap->gap_width}}
                    : nlohmann::json(nullptr);
  j["priority_events"] = nlohmann::json::array();
  for (const PriorityEvent& e : sc.priority_events) {
    j["priority_events"].push_back({{"at_time", e.at_time}, {"priorities", e.new_priorities}});
  }
  return j;
}

/// Parses and validates a scenario document. A document with a "generator"
/// block and no "robots" is instantiated from the generator with the
/// document's seed. When robots are listed they are used as written and the
/// generator only serves later reseeding.
inline Scenario scenario_from_json(const nlohmann::json& j) {
  using json_detail::get;
  using json_detail::require;
  using json_detail::vec;
  if (!j.is_object()) throw ValidationError("scenario", "expected a JSON object");
  const int version = get<int>(j, "format_version", "", kFormatVersion);
  if (version != kFormatVersion) throw ValidationError("format_version", "unsupported version " + std::to_string(version));

  Scenario sc;
  sc.name = get<std::string>(j, "name", "", sc.name);
  sc.arena_radius = get<double>(j, "arena_radius", "", sc.arena_radius);
  sc.dt = get<double>(j, "dt", "", sc.dt);
  sc.max_time = get<double>(j, "max_time", "", sc.max_time);
  sc.goal_tolerance = get<double>(j, "goal_tolerance", "", sc.goal_tolerance);
  sc.safe_distance = get<double>(j, "safe_distance", "", sc.safe_distance);
  sc.planner = parse_planner(get<std::string>(j, "planner", "", "faca"));
  sc.negotiator = parse_negotiator(get<std::string>(j, "negotiator", "", "scripted"));
  sc.seed = get<std::uint64_t>(j, "seed", "", 0);

  if (j.contains("field")) {
    const auto& f = j["field"];
    FieldParams& p = sc.field;
    p.kappa_A = get<double>(f, "kappa_A", "field.", p.kappa_A);
    p.phi_A = get<double>(f, "phi_A", "field.", p.phi_A);
    p.kappa_R = get<double>(f, "kappa_R", "field.", p.kappa_R);
    p.phi_R = get<double>(f, "phi_R", "field.", p.phi_R);
    p.subgoal_decay_c = get<double>(f, "subgoal_decay_c", "field.", p.subgoal_decay_c);
    p.blend_influence = get<double>(f, "blend_influence", "field.", p.blend_influence);
    p.v_max = get<double>(f, "v_max", "field.", p.v_max);
    p.horizon = get<double>(f, "horizon", "field.", p.horizon);
    p.yield_gain = get<double>(f, "yield_gain", "field.", p.yield_gain);
    p.caution_speed = get<double>(f, "caution_speed", "field.", p.caution_speed);
    p.pacing_radius = get<double>(f, "pacing_radius", "field.", p.pacing_radius);
    p.pacing_gap = get<double>(f, "pacing_gap", "field.", p.pacing_gap);
    p.pacing_speed = get<double>(f, "pacing_speed", "field.", p.pacing_speed);
    const auto scaling = get<std::string>(f, "priority_scaling", "field.", "yielding");
    if (scaling == "yielding") p.priority_scaling = PriorityScaling::kYielding;
    else if (scaling == "literal") p.priority_scaling = PriorityScaling::kLiteral;
    else throw ValidationError("field.priority_scaling", "expected yielding or literal");
  }
  if (j.contains("classical_apf")) {
    const auto& a = j["classical_apf"];
    ClassicalApfParams& p = sc.classical_apf;
    p.eta_A = get<double>(a, "eta_A", "classical_apf.", p.eta_A);
    p.eta_R = get<double>(a, "eta_R", "classical_apf.", p.eta_R);
    p.sigma = get<double>(a, "sigma", "classical_apf.", p.sigma);
    p.speed_gain = get<double>(a, "speed_gain", "classical_apf.", p.speed_gain);
  }
  if (j.contains("mpc")) {
    const auto& m = j["mpc"];
    MpcParams& p = sc.mpc;
    p.horizon_steps = get<int>(m, "horizon_steps", "mpc.", p.horizon_steps);
    p.samples = get<int>(m, "samples", "mpc.", p.samples);
    p.collision_weight = get<double>(m, "collision_weight", "mpc.", p.collision_weight);
    p.goal_weight = get<double>(m, "goal_weight", "mpc.", p.goal_weight);
  }
  if (j.contains("negotiation")) {
    const auto& n = j["negotiation"];
    sc.negotiation.max_rounds = get<int>(n, "max_rounds", "negotiation.", sc.negotiation.max_rounds);
    sc.negotiation.cooldown = get<double>(n, "cooldown", "negotiation.", sc.negotiation.cooldown);
    sc.negotiation.scripted_latency =
        get<double>(n, "scripted_latency", "negotiation.", sc.negotiation.scripted_latency);
  }

  std::optional<CircleSpec> generator;
  if (j.contains("generator") && !j["generator"].is_null()) {
    const auto& g = j["generator"];
    CircleSpec& spec = generator.emplace();
    const auto layout = get<std::string>(g, "layout", "generator.", "arc");
    if (layout == "arc") spec.layout = Layout::kArc;
    else if (layout == "head_on") spec.layout = Layout::kHeadOn;
    else throw ValidationError("generator.layout", "expected arc or head_on");
    spec.n = get<int>(g, "n", "generator.", spec.n);
    spec.arena_radius = get<double>(g, "arena_radius", "generator.", sc.arena_radius);
    spec.arc = get<double>(g, "arc", "generator.", spec.arc);
    spec.priority_event = get<bool>(g, "priority_event", "generator.", spec.priority_event);
    if (g.contains("gap_width")) spec.gap_width = get<double>(g, "gap_width", "generator.", 0.0);
    if (g.contains("obstacle_radius")) spec.obstacle_radius = get<double>(g, "obstacle_radius", "generator.", 0.0);
    if (g.contains("event_time")) spec.event_time = get<double>(g, "event_time", "generator.", 0.0);
    if (spec.n < 1) throw ValidationError("generator.n", "must be at least 1");
  }
  const bool has_robots = j.contains("robots") && !j["robots"].is_null();
  if (generator && !has_robots) {
    sc = make_circle_scenario(*generator, sc.seed, sc);
  } else {
    sc.generator = generator;
    if (!has_robots || !j["robots"].is_array()) throw ValidationError("robots", "is required");
    for (const auto& rj : j["robots"]) {
      RobotState r;
      r.id = require<std::string>(rj, "id", "robots.");
      r.position = vec(rj.value("start", nlohmann::json()), "robots." + r.id + ".start");
      r.goal = vec(rj.value("goal", nlohmann::json()), "robots." + r.id + ".goal");
      r.priority = get<double>(rj, "priority", "robots." + r.id + ".", 1.0);
      r.v_max = get<double>(rj, "v_max", "robots." + r.id + ".", sc.field.v_max);
      r.heading = angle_of(r.goal - r.position);
      r.mission.robot_id = r.id;
      r.mission.mission_text = get<std::string>(rj, "mission", "robots." + r.id + ".", "");
      r.mission.priority = r.priority;
      r.mission.distance_to_goal = distance(r.goal, r.position);
      if (rj.contains("urgency")) r.mission.urgency_note = rj["urgency"].get<std::string>();
      sc.robots.push_back(std::move(r));
    }
    if (j.contains("obstacles")) {
      for (const auto& oj : j["obstacles"]) {
        sc.obstacles.push_back({vec(oj.value("center", nlohmann::json()), "obstacles.center"),
                                require<double>(oj, "radius", "obstacles.")});
      }
    }
    if (j.contains("gap") && !j["gap"].is_null()) {
      const auto& gj = j["gap"];
      WallGap gap;
      gap.wall_x = get<double>(gj, "wall_x", "gap.", 0.0);
      gap.gap_center = gj.contains("gap_center") ? vec(gj["gap_center"], "gap.gap_center") : Vec2{gap.wall_x, 0.0};
      gap.gap_width = require<double>(gj, "gap_width", "gap.");
      sc.gap = gap;
    }
    if (j.contains("priority_events")) {
      for (const auto& ej : j["priority_events"]) {
        PriorityEvent e;
        e.at_time = require<double>(ej, "at_time", "priority_events.");
        e.new_priorities = get<std::map<RobotId, double>>(ej, "priorities", "priority_events.", {});
        sc.priority_events.push_back(std::move(e));
      }
    }
  }
  sync_shared_params(sc);
  validate(sc);
  return sc;
}

}  // namespace faca
