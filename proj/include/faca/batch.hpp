// Copyright 2026 The FACA Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

/// \file
/// Multi-seed batches and planner comparisons.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "faca/chat_client.hpp"
#include "faca/engine.hpp"
#include "faca/io.hpp"
#include "faca/metrics.hpp"
#include "faca/scenario.hpp"

namespace faca {

struct RunConfig {
  std::filesystem::path scenario_path;
  std::optional<PlannerKind> planner;
  std::optional<NegotiatorKind> negotiator;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path out_dir;  ///< empty: nothing is written
  ChatEndpoint llm;
  std::optional<int> max_rounds;
  int jobs = 1;
  bool write_figures = false;

  void validate() const {
    if (seeds.empty()) throw ValidationError("seeds", "at least one seed is required");
    if (jobs < 1) throw ValidationError("jobs", "must be at least 1");
  }
};

/// Parses "7", "1-100" or comma-separated mixes such as "1-3,10" into an
/// ordered seed list. Ranges are inclusive.
inline constexpr std::uint64_t kMaxSeeds = 1'000'000;

inline std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  auto number = [&](std::string_view part) {
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    std::uint64_t value = 0;
    const auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (part.empty() || ec != std::errc{} || end != part.data() + part.size()) {
      throw ValidationError("seeds", "bad seed '" + std::string(part) + "' in '" + text + "'");
    }
    return value;
  };
  std::string_view rest = text;
  while (true) {
    const std::size_t comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    const std::size_t dash = item.find('-');
    if (dash == std::string_view::npos) {
      seeds.push_back(number(item));
    } else {
      const std::uint64_t lo = number(item.substr(0, dash));
      const std::uint64_t hi = number(item.substr(dash + 1));
      if (hi < lo) throw ValidationError("seeds", "empty range '" + std::string(item) + "'");
      if (hi - lo >= kMaxSeeds) throw ValidationError("seeds", "range '" + std::string(item) + "' is too long");
      for (std::uint64_t v = lo;; ++v) {
        seeds.push_back(v);
        if (v == hi) break;
      }
    }
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return seeds;
}

/// Builds the chat client for one run; the default talks HTTP.
using ChatClientFactory = std::function<std::unique_ptr<ChatClient>(const ChatEndpoint&)>;

inline std::unique_ptr<ChatClient> default_chat_factory(const ChatEndpoint& endpoint) {
  return std::make_unique<HttpChatClient>(endpoint);
}

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  ///< sample standard deviation; 0 for one value
  std::size_t count = 0;
};

inline Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

struct Aggregate {
  std::size_t runs = 0;
  std::size_t errors = 0;
  std::size_t runs_with_timeouts = 0;
  Summary ttg_mean;
  Summary makespan;
  Summary mmd_robot;
  Summary mmd_obstacle;
  Summary min_separation;
  Summary flow_rate;
  std::size_t fairness_evaluated = 0;
  std::size_t fairness_true = 0;
};

struct SeedResult {
  std::uint64_t seed = 0;
  std::optional<MetricsReport> report;
  std::string error;  ///< non-empty when the run failed
};

struct BatchResult {
  std::vector<SeedResult> per_seed;  ///< in seed-list order
  Aggregate aggregate;

  int exit_code() const noexcept { return aggregate.errors == 0 ? 0 : 1; }
};

inline Aggregate aggregate(const std::vector<SeedResult>& results) {
  Aggregate a;
  std::vector<double> ttg, span, mmd_r, mmd_o, sep, fr;
  for (const SeedResult& r : results) {
    ++a.runs;
    if (!r.report) {
      ++a.errors;
      continue;
    }
    const MetricsReport& m = *r.report;
    if (!m.timeout_ids.empty()) ++a.runs_with_timeouts;
    ttg.push_back(m.ttg_mean);
    span.push_back(m.makespan);
    if (m.mmd_robot) mmd_r.push_back(*m.mmd_robot);
    if (m.mmd_obstacle) mmd_o.push_back(*m.mmd_obstacle);
    if (m.min_separation) sep.push_back(*m.min_separation);
    if (m.flow_rate) fr.push_back(*m.flow_rate);
    if (m.fairness_match) {
      ++a.fairness_evaluated;
      if (*m.fairness_match) ++a.fairness_true;
    }
  }
  a.ttg_mean = summarize(ttg);
  a.makespan = summarize(span);
  a.mmd_robot = summarize(mmd_r);
  a.mmd_obstacle = summarize(mmd_o);
  a.min_separation = summarize(sep);
  a.flow_rate = summarize(fr);
  return a;
}

inline nlohmann::json to_json(const Summary& s) {
  return {{"mean", s.mean}, {"stddev", s.stddev}, {"count", s.count}};
}

inline nlohmann::json to_json(const Aggregate& a) {
  return {{"format_version", kFormatVersion},
          {"runs", a.runs},
          {"errors", a.errors},
          {"runs_with_timeouts", a.runs_with_timeouts},
          {"ttg_mean", to_json(a.ttg_mean)},
          {"makespan", to_json(a.makespan)},
          {"mmd_robot", to_json(a.mmd_robot)},
          {"mmd_obstacle", to_json(a.mmd_obstacle)},
          {"min_separation", to_json(a.min_separation)},
          {"flow_rate", to_json(a.flow_rate)},
          {"fairness_evaluated", a.fairness_evaluated},
          {"fairness_true", a.fairness_true}};
}

/// Applies the config's overrides and seed to a loaded scenario.
inline Scenario configure(const Scenario& base, const RunConfig& config, std::uint64_t seed) {
  Scenario sc = reseed(base, seed);
  if (config.planner) sc.planner = *config.planner;
  if (config.negotiator) sc.negotiator = *config.negotiator;
  if (config.max_rounds) sc.negotiation.max_rounds = *config.max_rounds;
  return sc;
}

/// Runs one configured scenario and writes its artifacts under `dir` when
/// `dir` is non-empty.
inline MetricsReport run_one(const Scenario& sc, const RunConfig& config, const ChatClientFactory& factory,
                             const std::filesystem::path& dir) {
  std::unique_ptr<ChatClient> chat;
  SimulationOptions options;
  if (sc.negotiator == NegotiatorKind::kLlm) {
    chat = factory(config.llm);
    options.chat = chat.get();
  }
  const TrajectoryLog log = run(sc, std::move(options));
  const MetricsReport report = compute_metrics(log);
  if (!dir.empty()) {
    write_log(log, dir);
    write_file(dir / kMetricsFile, to_json(report).dump(2) + "\n");
    if (config.write_figures) emit_svg(log, dir / kFigureFile);
  }
  return report;
}

/// Runs every seed (up to `jobs` at a time). Failed runs are recorded, not
/// thrown; timeouts are ordinary data.
inline BatchResult run_batch(const Scenario& base, const RunConfig& config,
                             const ChatClientFactory& factory = default_chat_factory) {
  config.validate();
  BatchResult result;
  result.per_seed.resize(config.seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < config.seeds.size(); k = next++) {
      SeedResult& out = result.per_seed[k];
      out.seed = config.seeds[k];
      try {
        const Scenario sc = configure(base, config, out.seed);
        const std::filesystem::path dir =
            config.out_dir.empty() ? std::filesystem::path{} : config.out_dir / ("seed_" + std::to_string(out.seed));
        out.report = run_one(sc, config, factory, dir);
      } catch (const std::exception& e) {
        out.error = e.what();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(config.jobs), config.seeds.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  result.aggregate = aggregate(result.per_seed);
  if (!config.out_dir.empty()) {
    nlohmann::json j = to_json(result.aggregate);
    j["scenario"] = base.name;
    j["failures"] = nlohmann::json::array();
    for (const SeedResult& r : result.per_seed) {
      if (!r.error.empty()) j["failures"].push_back({{"seed", r.seed}, {"error", r.error}});
    }
    write_file(config.out_dir / "aggregate.json", j.dump(2) + "\n");
  }
  return result;
}

inline BatchResult run_batch(const RunConfig& config, const ChatClientFactory& factory = default_chat_factory) {
  return run_batch(load_scenario(config.scenario_path), config, factory);
}

struct ComparisonRow {
  PlannerKind planner;
  NegotiatorKind negotiator;
  Aggregate aggregate;
};

struct Comparison {
  std::vector<ComparisonRow> rows;

  std::string table() const {
    auto cell = [](const Summary& s) { return s.count ? format_double(s.mean) : std::string("-"); };
    std::string out = "planner,negotiator,runs,errors,ttg_mean,mmd_robot,flow_rate\n";
    for (const ComparisonRow& r : rows) {
      out += to_string(r.planner) + "," + to_string(r.negotiator) + "," + std::to_string(r.aggregate.runs) + "," +
             std::to_string(r.aggregate.errors) + "," + cell(r.aggregate.ttg_mean) + "," +
             cell(r.aggregate.mmd_robot) + "," + cell(r.aggregate.flow_rate) + "\n";
    }
    return out;
  }

  nlohmann::json json() const {
    nlohmann::json j{{"format_version", kFormatVersion}, {"rows", nlohmann::json::array()}};
    for (const ComparisonRow& r : rows) {
      j["rows"].push_back({{"planner", to_string(r.planner)},
                           {"negotiator", to_string(r.negotiator)},
                           {"aggregate", to_json(r.aggregate)}});
    }
    return j;
  }
};

/// One batch per planner x negotiator mode. Per-row logs go to
/// out_dir/<planner>_<negotiator>/.
inline Comparison compare(const Scenario& base, const RunConfig& config, const std::vector<PlannerKind>& planners,
                          std::vector<NegotiatorKind> negotiators,
                          const ChatClientFactory& factory = default_chat_factory) {
  if (planners.size() < 2) throw InvalidArgument("compare needs at least two planners");
  if (negotiators.empty()) negotiators.push_back(config.negotiator.value_or(base.negotiator));
  Comparison cmp;
  for (PlannerKind p : planners) {
    for (NegotiatorKind n : negotiators) {
      RunConfig row = config;
      row.planner = p;
      row.negotiator = n;
      if (!config.out_dir.empty()) row.out_dir = config.out_dir / (to_string(p) + "_" + to_string(n));
      const BatchResult batch = run_batch(base, row, factory);
      if (batch.exit_code() != 0) {
        for (const SeedResult& r : batch.per_seed) {
          if (!r.error.empty()) throw Error(to_string(p) + " seed " + std::to_string(r.seed) + ": " + r.error);
        }
      }
      cmp.rows.push_back({p, n, batch.aggregate});
    }
  }
  if (!config.out_dir.empty()) {
    write_file(config.out_dir / "comparison.csv", cmp.table());
    write_file(config.out_dir / "comparison.json", cmp.json().dump(2) + "\n");
  }
  return cmp;
}

}  // namespace faca
