// Copyright 2026 The FACA Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

/// \file
/// Pairwise right-of-way negotiation between two robots in conflict.
///
/// A session is a strictly alternating exchange between two robots. It ends
/// with a PriorityAssignment produced either by the deterministic scripted
/// rule or by an LLM dialogue (with the scripted rule as fallback).

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "faca/error.hpp"
#include "faca/prompt_assets.hpp"
#include "faca/robot.hpp"

namespace faca {

/// Priorities closer than this are treated as equal by the scripted rule.
inline constexpr double kPriorityEpsilon = 1e-6;
/// Distances to goal closer than this (m) are treated as equal.
inline constexpr double kDistanceEpsilon = 1e-6;

struct PriorityAssignment {
  RobotId high;
  RobotId low;
  /// Empty when only the ranking is known (e.g. straight out of parse_agreement).
  std::map<RobotId, double> new_priorities;

  friend bool operator==(const PriorityAssignment&, const PriorityAssignment&) = default;
};

struct TranscriptEntry {
  RobotId speaker;
  std::string text;

  friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

using RobotPair = std::pair<RobotId, RobotId>;

/// Orders a pair so that first < second.
inline RobotPair canonical_pair(const RobotId& a, const RobotId& b) {
  return a < b ? RobotPair{a, b} : RobotPair{b, a};
}

struct NegotiationSession {
  RobotPair pair;  ///< pair.first speaks first
  std::vector<TranscriptEntry> transcript;
  int max_rounds = 3;
  std::optional<PriorityAssignment> outcome;
  bool used_fallback = false;
  std::string fallback_reason;

  /// Appends a message; speakers must alternate starting with pair.first.
  void append(const RobotId& speaker, std::string text) {
    if (transcript.size() >= static_cast<std::size_t>(2 * max_rounds)) {
      throw InvalidArgument("negotiation transcript is full");
    }
    const RobotId& expected = transcript.size() % 2 == 0 ? pair.first : pair.second;
    if (speaker != expected) throw InvalidArgument("negotiation speakers must alternate; expected " + expected);
    transcript.push_back({speaker, std::move(text)});
  }
};

/// Tracks which unordered pairs have a session in progress.
class SessionRegistry {
 public:
  NegotiationSession open(const MissionContext& ctx_i, const MissionContext& ctx_j, int max_rounds) {
    if (ctx_i.robot_id == ctx_j.robot_id) throw SamePair("cannot negotiate with oneself: " + ctx_i.robot_id);
    if (max_rounds < 1) throw InvalidArgument("max_rounds must be at least 1");
    RobotPair pair = canonical_pair(ctx_i.robot_id, ctx_j.robot_id);
    if (!active_.insert(pair).second) {
      throw SamePair("session already open for " + pair.first + "/" + pair.second);
    }
    NegotiationSession session;
    session.pair = std::move(pair);
    session.max_rounds = max_rounds;
    return session;
  }

  void close(const RobotPair& pair) { active_.erase(canonical_pair(pair.first, pair.second)); }

  bool is_open(const RobotId& a, const RobotId& b) const { return active_.contains(canonical_pair(a, b)); }

  std::size_t size() const noexcept { return active_.size(); }

 private:
  std::set<RobotPair> active_;
};

/// Fills new_priorities with (max + 1, min) of the two mission priorities.
inline PriorityAssignment with_new_priorities(RobotId high, RobotId low, double rho_a, double rho_b) {
  PriorityAssignment out{std::move(high), std::move(low), {}};
  out.new_priorities[out.high] = std::max(rho_a, rho_b) + 1.0;
  out.new_priorities[out.low] = std::min(rho_a, rho_b);
  return out;
}

/// Deterministic rule: higher priority wins, then shorter distance to goal,
/// then the lexicographically smaller id.
inline PriorityAssignment scripted_negotiate(const MissionContext& ctx_i, const MissionContext& ctx_j) {
  if (ctx_i.robot_id == ctx_j.robot_id) throw InvalidArgument("scripted_negotiate: identical robot ids");
  bool i_wins;
  if (std::abs(ctx_i.priority - ctx_j.priority) > kPriorityEpsilon) {
    i_wins = ctx_i.priority > ctx_j.priority;
  } else if (std::abs(ctx_i.distance_to_goal - ctx_j.distance_to_goal) > kDistanceEpsilon) {
    i_wins = ctx_i.distance_to_goal < ctx_j.distance_to_goal;
  } else {
    i_wins = ctx_i.robot_id < ctx_j.robot_id;
  }
  const MissionContext& hi = i_wins ? ctx_i : ctx_j;
  const MissionContext& lo = i_wins ? ctx_j : ctx_i;
  return with_new_priorities(hi.robot_id, lo.robot_id, ctx_i.priority, ctx_j.priority);
}

/// Finds "{<id>: high priority, <id>: low priority}" anywhere in text.
/// Only the ranking is filled in; new_priorities stays empty.
inline std::optional<PriorityAssignment> parse_agreement(const std::string& text) {
  static const std::regex pattern(
      R"(\{\s*["']?([^{}:,"'\s]+)["']?\s*:\s*high\s+priority\s*,\s*["']?([^{}:,"'\s]+)["']?\s*:\s*low\s+priority\s*\})",
      std::regex::icase | std::regex::ECMAScript);
  std::smatch m;
  if (!std::regex_search(text, m, pattern)) return std::nullopt;
  if (m[1].str() == m[2].str()) return std::nullopt;
  return PriorityAssignment{m[1].str(), m[2].str(), {}};
}

/// Replaces the priorities of the assignment's pair; every other entry is kept.
inline std::map<RobotId, double> apply_assignment(std::map<RobotId, double> world_priorities,
                                                  const PriorityAssignment& assignment) {
  for (const RobotId* id : {&assignment.high, &assignment.low}) {
    if (!world_priorities.contains(*id)) throw UnknownRobot("unknown robot in assignment: " + *id);
  }
  for (const auto& [id, rho] : assignment.new_priorities) {
    auto it = world_priorities.find(id);
    if (it == world_priorities.end()) throw UnknownRobot("unknown robot in assignment: " + id);
    it->second = rho;
  }
  return world_priorities;
}

// --- LLM-backed negotiation --------------------------------------------------

struct ChatMessage {
  std::string role;  ///< "system", "user" or "assistant"
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

/// A chat-completion service. Implementations throw TransportError on
/// network failure or timeout.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string complete(std::span<const ChatMessage> messages) = 0;
};

/// Substitutes every {{key}} in tmpl.
inline std::string render_template(std::string tmpl, const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    const std::string token = "{{" + key + "}}";
    for (std::size_t pos = tmpl.find(token); pos != std::string::npos; pos = tmpl.find(token, pos + value.size())) {
      tmpl.replace(pos, token.size(), value);
    }
  }
  return tmpl;
}

inline std::string format_number(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

inline std::string negotiator_system_prompt(const MissionContext& self, const RobotId& other, int max_rounds) {
  return render_template(std::string(prompts::kNegotiation),
                         {{"robot_id", self.robot_id},
                          {"other_id", other},
                          {"mission", self.mission_text},
                          {"priority", format_number(self.priority, 2)},
                          {"distance_to_goal", format_number(self.distance_to_goal, 1)},
                          {"urgency", self.urgency_note ? "Urgency note: " + *self.urgency_note + "\n" : ""},
                          {"max_rounds", std::to_string(max_rounds)}});
}

inline std::string referee_system_prompt(const RobotPair& pair) {
  return render_template(std::string(prompts::kAgreement), {{"id_a", pair.first}, {"id_b", pair.second}});
}

/// Builds the request for `speaker`'s next turn: its system prompt, then the
/// transcript with its own lines as assistant turns and the peer's as user turns.
inline std::vector<ChatMessage> turn_request(const NegotiationSession& session, const MissionContext& speaker,
                                             const RobotId& other) {
  std::vector<ChatMessage> messages;
  messages.push_back({"system", negotiator_system_prompt(speaker, other, session.max_rounds)});
  if (session.transcript.empty()) {
    messages.push_back({"user", "Collision warning: you are on a conflicting course with " + other +
                                    ". Open the conversation."});
  }
  for (const TranscriptEntry& entry : session.transcript) {
    messages.push_back({entry.speaker == speaker.robot_id ? "assistant" : "user", entry.text});
  }
  return messages;
}

inline std::vector<ChatMessage> referee_request(const NegotiationSession& session) {
  std::string dialogue;
  for (const TranscriptEntry& entry : session.transcript) dialogue += entry.speaker + ": " + entry.text + "\n";
  return {{"system", referee_system_prompt(session.pair)}, {"user", dialogue}};
}

struct LlmNegotiationOptions {
  bool fallback = true;  ///< use scripted_negotiate when the dialogue fails
};

namespace detail {

/// Maps the ids named by the model onto the session's ids, or nothing.
inline std::optional<PriorityAssignment> match_pair(const std::optional<PriorityAssignment>& parsed,
                                                    const RobotPair& pair) {
  if (!parsed) return std::nullopt;
  auto resolve = [&](const std::string& name) -> std::optional<RobotId> {
    for (const RobotId* id : {&pair.first, &pair.second}) {
      if (name.size() == id->size() &&
          std::equal(name.begin(), name.end(), id->begin(),
                     [](char a, char b) { return std::tolower(static_cast<unsigned char>(a)) ==
                                                 std::tolower(static_cast<unsigned char>(b)); })) {
        return *id;
      }
    }
    return std::nullopt;
  };
  auto high = resolve(parsed->high);
  auto low = resolve(parsed->low);
  if (!high || !low || *high == *low) return std::nullopt;
  return PriorityAssignment{*high, *low, {}};
}

}  // namespace detail

/// Runs the alternating dialogue until a consensus is found.
///
/// After every turn the newest message is scanned for an agreement line; if
/// it has none, a referee request asks the service whether the robots have
/// agreed. When the dialogue exhausts max_rounds or the service fails, the
/// scripted rule decides (unless options.fallback is false).
inline PriorityAssignment llm_negotiate(NegotiationSession& session, const MissionContext& ctx_i,
                                        const MissionContext& ctx_j, ChatClient& client,
                                        const LlmNegotiationOptions& options = {}) {
  const MissionContext& first = ctx_i.robot_id == session.pair.first ? ctx_i : ctx_j;
  const MissionContext& second = ctx_i.robot_id == session.pair.first ? ctx_j : ctx_i;
  if (first.robot_id != session.pair.first || second.robot_id != session.pair.second) {
    throw InvalidArgument("llm_negotiate: contexts do not match the session pair");
  }

  auto finish = [&](PriorityAssignment ranking) {
    const double rho_first = first.priority;
    const double rho_second = second.priority;
    session.outcome = with_new_priorities(ranking.high, ranking.low, rho_first, rho_second);
    return *session.outcome;
  };
  auto fall_back = [&](std::string reason) {
    session.used_fallback = true;
    session.fallback_reason = std::move(reason);
    session.outcome = scripted_negotiate(ctx_i, ctx_j);
    return *session.outcome;
  };

  try {
    const std::size_t max_messages = 2 * static_cast<std::size_t>(session.max_rounds);
    while (session.transcript.size() < max_messages) {
      const bool first_turn = session.transcript.size() % 2 == 0;
      const MissionContext& speaker = first_turn ? first : second;
      const RobotId& other = first_turn ? second.robot_id : first.robot_id;

      const auto request = turn_request(session, speaker, other);
      session.append(speaker.robot_id, client.complete(request));

      if (auto found = detail::match_pair(parse_agreement(session.transcript.back().text), session.pair)) {
        return finish(*found);
      }
      const auto verdict_request = referee_request(session);
      if (auto found = detail::match_pair(parse_agreement(client.complete(verdict_request)), session.pair)) {
        return finish(*found);
      }
    }
  } catch (const TransportError& e) {
    if (!options.fallback) throw;
    return fall_back(std::string("transport: ") + e.what());
  }

  if (!options.fallback) {
    throw MalformedReply("no agreement between " + session.pair.first + " and " + session.pair.second +
                         " after " + std::to_string(session.max_rounds) + " rounds");
  }
  return fall_back("no consensus within max_rounds");
}

}  // namespace faca
