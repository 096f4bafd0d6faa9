// Copyright 2026 The FACA Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

/// \file
/// On-disk formats: scenario and report JSON, trajectory CSV, transcript
/// JSONL and SVG figures. Doubles are written in shortest round-trip form so
/// that serialize -> parse -> serialize is byte-stable.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "faca/engine.hpp"
#include "faca/error.hpp"
#include "faca/metrics.hpp"
#include "faca/scenario.hpp"

namespace faca {

inline constexpr const char* kLogFile = "log.json";
inline constexpr const char* kTrajectoryFile = "trajectory.csv";
inline constexpr const char* kTranscriptFile = "transcripts.jsonl";
inline constexpr const char* kMetricsFile = "metrics.json";
inline constexpr const char* kFigureFile = "trajectory.svg";
inline constexpr const char* kTrajectoryHeader = "t,id,x,y,vx,vy,heading,priority";

inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

inline double parse_double(std::string_view s, const std::string& what) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ParseError("bad number '" + std::string(s) + "' in " + what);
  }
  return v;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << bytes;
  if (!out) throw Error("write failed for " + path.string());
}

inline nlohmann::json parse_json(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(what + ": " + e.what());
  }
}

// --- scenarios ---------------------------------------------------------------------

inline Scenario load_scenario(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error("scenario file not found: " + path.string());
  const nlohmann::json j = parse_json(read_file(path), path.string());
  try {
    return scenario_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline void save_scenario(const Scenario& sc, const std::filesystem::path& path) {
  write_file(path, to_json(sc).dump(2) + "\n");
}

// --- logs -------------------------------------------------------------------------

/// The three files making up a serialized run.
struct LogFiles {
  std::string log_json;
  std::string trajectory_csv;
  std::string transcripts_jsonl;

  friend bool operator==(const LogFiles&, const LogFiles&) = default;
};

namespace io_detail {

inline nlohmann::json optional_time(const std::optional<double>& t) {
  return t ? nlohmann::json(*t) : nlohmann::json(nullptr);
}

inline nlohmann::json assignment_to_json(const PriorityAssignment& a) {
  return {{"high", a.high}, {"low", a.low}, {"new_priorities", a.new_priorities}};
}

inline PriorityAssignment assignment_from_json(const nlohmann::json& j) {
  return {j.at("high").get<RobotId>(), j.at("low").get<RobotId>(),
          j.at("new_priorities").get<std::map<RobotId, double>>()};
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace io_detail

inline LogFiles serialize_log(const TrajectoryLog& log) {
  using io_detail::assignment_to_json;
  LogFiles files;

  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["scenario_digest"] = log.scenario_digest;
  j["scenario"] = to_json(log.scenario);
  j["steps"] = log.snapshots.size();
  j["arrivals"] = nlohmann::json::object();
  for (std::size_t i = 0; i < log.scenario.robots.size(); ++i) {
    j["arrivals"][log.scenario.robots[i].id] =
        io_detail::optional_time(i < log.arrivals.size() ? log.arrivals[i] : std::nullopt);
  }
  j["final_priorities"] = log.final_priorities;
  j["final_mission_priorities"] = log.final_mission_priorities;
  j["active_sessions"] = nlohmann::json::array();
  for (std::size_t k = 0; k < log.snapshots.size(); ++k) {
    if (log.snapshots[k].active_sessions.empty()) continue;
    nlohmann::json pairs = nlohmann::json::array();
    for (const RobotPair& p : log.snapshots[k].active_sessions) pairs.push_back({p.first, p.second});
    j["active_sessions"].push_back({{"step", k}, {"pairs", pairs}});
  }
  j["negotiations"] = nlohmann::json::array();
  for (const NegotiationRecord& rec : log.negotiations) {
    const NegotiationSession& s = rec.session;
    j["negotiations"].push_back({{"pair", {s.pair.first, s.pair.second}},
                                 {"opened_at", rec.opened_at},
                                 {"resolved_at", rec.resolved_at},
                                 {"max_rounds", s.max_rounds},
                                 {"messages", s.transcript.size()},
                                 {"outcome", s.outcome ? assignment_to_json(*s.outcome) : nlohmann::json(nullptr)},
                                 {"used_fallback", s.used_fallback},
                                 {"fallback_reason", s.fallback_reason}});
  }
  files.log_json = j.dump(2) + "\n";

  std::string csv = std::string(kTrajectoryHeader) + "\n";
  for (const Snapshot& snap : log.snapshots) {
    const std::string t = format_double(snap.t);
    for (const RobotState& r : snap.robots) {
      csv += t;
      csv += ',' + r.id;
      for (double v : {r.position.x, r.position.y, r.velocity.x, r.velocity.y, r.heading, r.priority}) {
        csv += ',';
        csv += format_double(v);
      }
      csv += '\n';
    }
  }
  files.trajectory_csv = std::move(csv);

  std::string jsonl;
  for (std::size_t k = 0; k < log.negotiations.size(); ++k) {
    const NegotiationSession& s = log.negotiations[k].session;
    for (std::size_t m = 0; m < s.transcript.size(); ++m) {
      const nlohmann::json line{{"session", k}, {"turn", m}, {"speaker", s.transcript[m].speaker},
                                {"text", s.transcript[m].text}};
      jsonl += line.dump() + "\n";
    }
  }
  files.transcripts_jsonl = std::move(jsonl);
  return files;
}

inline TrajectoryLog deserialize_log(const LogFiles& files) {
  const nlohmann::json j = parse_json(files.log_json, kLogFile);
  TrajectoryLog log;
  try {
    if (j.at("format_version").get<int>() != kFormatVersion) throw ParseError("unsupported log format_version");
    log.scenario = scenario_from_json(j.at("scenario"));
    log.scenario_digest = j.at("scenario_digest").get<std::string>();
    for (const RobotState& r : log.scenario.robots) {
      const auto& a = j.at("arrivals").at(r.id);
      log.arrivals.push_back(a.is_null() ? std::nullopt : std::optional<double>(a.get<double>()));
    }
    log.final_priorities = j.at("final_priorities").get<std::map<RobotId, double>>();
    log.final_mission_priorities = j.at("final_mission_priorities").get<std::map<RobotId, double>>();
    for (const auto& nj : j.at("negotiations")) {
      NegotiationRecord rec;
      rec.session.pair = {nj.at("pair").at(0).get<RobotId>(), nj.at("pair").at(1).get<RobotId>()};
      rec.session.max_rounds = nj.at("max_rounds").get<int>();
      rec.opened_at = nj.at("opened_at").get<double>();
      rec.resolved_at = nj.at("resolved_at").get<double>();
      if (!nj.at("outcome").is_null()) rec.session.outcome = io_detail::assignment_from_json(nj.at("outcome"));
      rec.session.used_fallback = nj.at("used_fallback").get<bool>();
      rec.session.fallback_reason = nj.at("fallback_reason").get<std::string>();
      log.negotiations.push_back(std::move(rec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string(kLogFile) + ": " + e.what());
  }

  std::istringstream transcripts(files.transcripts_jsonl);
  std::string line;
  while (std::getline(transcripts, line)) {
    if (line.empty()) continue;
    const nlohmann::json m = parse_json(line, kTranscriptFile);
    try {
      const auto k = m.at("session").get<std::size_t>();
      if (k >= log.negotiations.size()) throw ParseError("transcript refers to unknown session");
      log.negotiations[k].session.append(m.at("speaker").get<RobotId>(), m.at("text").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string(kTranscriptFile) + ": " + e.what());
    }
  }

  const auto& robots = log.scenario.robots;
  std::istringstream csv(files.trajectory_csv);
  if (!std::getline(csv, line) || line != kTrajectoryHeader) throw ParseError("trajectory.csv: bad header");
  std::size_t row = 0;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    const auto cells = io_detail::split(line, ',');
    if (cells.size() != 8) throw ParseError("trajectory.csv: expected 8 columns on row " + std::to_string(row + 1));
    const std::size_t i = row % robots.size();
    if (i == 0) log.snapshots.push_back({parse_double(cells[0], kTrajectoryFile), {}, {}});
    Snapshot& snap = log.snapshots.back();
    if (cells[1] != robots[i].id) throw ParseError("trajectory.csv: unexpected robot " + std::string(cells[1]));
    RobotState r = robots[i];
    r.position = {parse_double(cells[2], kTrajectoryFile), parse_double(cells[3], kTrajectoryFile)};
    r.velocity = {parse_double(cells[4], kTrajectoryFile), parse_double(cells[5], kTrajectoryFile)};
    r.heading = parse_double(cells[6], kTrajectoryFile);
    r.priority = parse_double(cells[7], kTrajectoryFile);
    if (log.arrivals[i] && *log.arrivals[i] <= snap.t) r.arrived_at = log.arrivals[i];
    snap.robots.push_back(std::move(r));
    ++row;
  }
  if (!robots.empty() && row % robots.size() != 0) throw ParseError("trajectory.csv: truncated snapshot");

  try {
    for (const auto& aj : j.at("active_sessions")) {
      const auto k = aj.at("step").get<std::size_t>();
      if (k >= log.snapshots.size()) throw ParseError("active session refers to unknown step");
      for (const auto& p : aj.at("pairs")) log.snapshots[k].active_sessions.push_back({p.at(0), p.at(1)});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string(kLogFile) + ": " + e.what());
  }
  return log;
}

inline void write_log(const TrajectoryLog& log, const std::filesystem::path& dir) {
  const LogFiles files = serialize_log(log);
  write_file(dir / kLogFile, files.log_json);
  write_file(dir / kTrajectoryFile, files.trajectory_csv);
  write_file(dir / kTranscriptFile, files.transcripts_jsonl);
}

inline TrajectoryLog read_log(const std::filesystem::path& dir) {
  LogFiles files{read_file(dir / kLogFile), read_file(dir / kTrajectoryFile), {}};
  if (std::filesystem::exists(dir / kTranscriptFile)) files.transcripts_jsonl = read_file(dir / kTranscriptFile);
  return deserialize_log(files);
}

// --- reports ----------------------------------------------------------------------

inline nlohmann::json to_json(const MetricsReport& m) {
  auto opt = [](const auto& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"format_version", kFormatVersion},
          {"ttg_per_robot", m.ttg_per_robot},
          {"ttg_mean", m.ttg_mean},
          {"makespan", m.makespan},
          {"mmd_robot", opt(m.mmd_robot)},
          {"mmd_obstacle", opt(m.mmd_obstacle)},
          {"min_separation", opt(m.min_separation)},
          {"flow_rate", opt(m.flow_rate)},
          {"fairness_match", opt(m.fairness_match)},
          {"timeout_ids", m.timeout_ids},
          {"negotiations", m.negotiations}};
}

// --- figures ----------------------------------------------------------------------

namespace io_detail {

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                           "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};

inline std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace io_detail

/// Renders trajectories as SVG in world coordinates (y up).
inline std::string render_svg(const TrajectoryLog& log) {
  using io_detail::fixed;
  if (log.snapshots.empty()) throw InvalidArgument("cannot render an empty log");
  const Scenario& sc = log.scenario;
  const double half = sc.arena_radius + 5.0;
  const double marker = std::max(0.5, sc.arena_radius / 60.0);
  const std::string stroke = fixed(marker / 3.0);

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"" << fixed(-half) << ' '
      << fixed(-half) << ' ' << fixed(2 * half) << ' ' << fixed(2 * half) << "\">\n"
      << "<title>" << sc.name << "</title>\n"
      << "<rect x=\"" << fixed(-half) << "\" y=\"" << fixed(-half) << "\" width=\"" << fixed(2 * half)
      << "\" height=\"" << fixed(2 * half) << "\" fill=\"#ffffff\"/>\n"
      << "<g transform=\"scale(1,-1)\">\n";

  for (const CircularObstacle& o : sc.obstacles) {
    out << "<circle class=\"obstacle\" cx=\"" << fixed(o.center.x) << "\" cy=\"" << fixed(o.center.y) << "\" r=\""
        << fixed(o.radius) << "\" fill=\"#888888\"/>\n";
  }
  if (sc.gap) {
    const WallGap& g = *sc.gap;
    const double lo = g.gap_center.y - g.gap_width / 2.0;
    const double hi = g.gap_center.y + g.gap_width / 2.0;
    for (auto [y0, y1] : {std::pair{-sc.arena_radius, lo}, std::pair{hi, sc.arena_radius}}) {
      out << "<line class=\"wall\" x1=\"" << fixed(g.wall_x) << "\" y1=\"" << fixed(y0) << "\" x2=\""
          << fixed(g.wall_x) << "\" y2=\"" << fixed(y1) << "\" stroke=\"#000000\" stroke-width=\"" << stroke
          << "\"/>\n";
    }
  }

  const std::size_t n = log.snapshots.front().robots.size();
  for (std::size_t i = 0; i < n; ++i) {
    const char* color = io_detail::kPalette[i % std::size(io_detail::kPalette)];
    const RobotState& first = log.snapshots.front().robots[i];
    out << "<polyline class=\"path\" data-id=\"" << first.id << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"" << stroke << "\" points=\"";
    for (std::size_t k = 0; k < log.snapshots.size(); ++k) {
      const Vec2 p = log.snapshots[k].robots[i].position;
      out << (k ? " " : "") << fixed(p.x) << ',' << fixed(p.y);
    }
    out << "\"/>\n";
    const Vec2 s = first.position;
    const Vec2 g = first.goal;
    out << "<rect class=\"start\" data-id=\"" << first.id << "\" x=\"" << fixed(s.x - marker / 2) << "\" y=\""
        << fixed(s.y - marker / 2) << "\" width=\"" << fixed(marker) << "\" height=\"" << fixed(marker)
        << "\" fill=\"" << color << "\"/>\n";
    out << "<path class=\"goal\" data-id=\"" << first.id << "\" d=\"M" << fixed(g.x - marker) << ',' << fixed(g.y)
        << " L" << fixed(g.x + marker) << ',' << fixed(g.y) << " M" << fixed(g.x) << ',' << fixed(g.y - marker)
        << " L" << fixed(g.x) << ',' << fixed(g.y + marker) << "\" stroke=\"" << color << "\" stroke-width=\""
        << stroke << "\"/>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

inline void emit_svg(const TrajectoryLog& log, const std::filesystem::path& path) { write_file(path, render_svg(log)); }

}  // namespace faca
