// Copyright 2026 The FACA Authors
// SPDX-License-Identifier: Apache-2.0

// faca: run, batch, compare and render simulations from the command line.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "faca/batch.hpp"
#include "faca/io.hpp"
#include "faca/metrics.hpp"
#include "faca/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kUsageError = 2;

struct CommonFlags {
  std::string scenario;
  std::vector<std::string> planners;
  std::vector<std::string> negotiators;
  std::string seeds = "0";
  std::string out;
  std::string llm_url;
  std::string llm_model;
  int llm_timeout_ms = 0;
  int max_rounds = 0;
  int jobs = 1;
  bool figures = false;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool many_planners) {
  cmd->add_option("--scenario", f.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  if (many_planners) {
    cmd->add_option("--planner", f.planners, "Planners to compare (faca, classical_apf, mpc)")
        ->delimiter(',')
        ->required();
    cmd->add_option("--negotiator", f.negotiators, "Negotiator modes (none, scripted, llm)")->delimiter(',');
  } else {
    cmd->add_option("--planner", f.planners, "Planner override (faca, classical_apf, mpc)")->expected(1);
    cmd->add_option("--negotiator", f.negotiators, "Negotiator override (none, scripted, llm)")->expected(1);
  }
  cmd->add_option("--seeds", f.seeds, "Seed list such as 7, 1-100 or 1-3,10")->capture_default_str();
  cmd->add_option("--llm-url", f.llm_url, "Chat completions endpoint");
  cmd->add_option("--llm-model", f.llm_model, "Chat model name");
  cmd->add_option("--llm-timeout-ms", f.llm_timeout_ms, "Per-request timeout")->check(CLI::PositiveNumber);
  cmd->add_option("--max-rounds", f.max_rounds, "Dialogue rounds before the fallback")->check(CLI::PositiveNumber);
}

faca::RunConfig make_config(const CommonFlags& f) {
  faca::RunConfig config;
  config.scenario_path = f.scenario;
  config.seeds = faca::parse_seed_list(f.seeds);
  config.out_dir = f.out;
  config.jobs = f.jobs;
  config.write_figures = f.figures;
  if (!f.llm_url.empty()) config.llm.url = f.llm_url;
  if (!f.llm_model.empty()) config.llm.model = f.llm_model;
  if (f.llm_timeout_ms > 0) config.llm.timeout_ms = f.llm_timeout_ms;
  if (f.max_rounds > 0) config.max_rounds = f.max_rounds;
  return config;
}

void print_report(const faca::MetricsReport& m) {
  std::cout << faca::to_json(m).dump(2) << "\n";
}

void print_aggregate(const faca::BatchResult& result) {
  const faca::Aggregate& a = result.aggregate;
  std::printf("runs %zu  errors %zu  with timeouts %zu\n", a.runs, a.errors, a.runs_with_timeouts);
  auto line = [](const char* name, const faca::Summary& s) {
    if (s.count == 0) return;
    std::printf("%-15s %10.4f  sd %8.4f  (n=%zu)\n", name, s.mean, s.stddev, s.count);
  };
  line("ttg_mean", a.ttg_mean);
  line("makespan", a.makespan);
  line("mmd_robot", a.mmd_robot);
  line("mmd_obstacle", a.mmd_obstacle);
  line("min_separation", a.min_separation);
  line("flow_rate", a.flow_rate);
  if (a.fairness_evaluated > 0) std::printf("fairness_match  %zu / %zu\n", a.fairness_true, a.fairness_evaluated);
  for (const faca::SeedResult& r : result.per_seed) {
    if (!r.error.empty()) std::fprintf(stderr, "seed %llu failed: %s\n", static_cast<unsigned long long>(r.seed),
                                       r.error.c_str());
  }
}

int cmd_run(const CommonFlags& f) {
  faca::RunConfig config = make_config(f);
  if (config.seeds.size() != 1) throw faca::ValidationError("seeds", "run takes exactly one seed; use batch");
  if (!f.planners.empty()) config.planner = faca::parse_planner(f.planners.front());
  if (!f.negotiators.empty()) config.negotiator = faca::parse_negotiator(f.negotiators.front());
  const faca::Scenario sc = faca::configure(faca::load_scenario(config.scenario_path), config, config.seeds.front());
  print_report(faca::run_one(sc, config, faca::default_chat_factory, config.out_dir));
  return 0;
}

int cmd_batch(const CommonFlags& f) {
  faca::RunConfig config = make_config(f);
  if (!f.planners.empty()) config.planner = faca::parse_planner(f.planners.front());
  if (!f.negotiators.empty()) config.negotiator = faca::parse_negotiator(f.negotiators.front());
  const faca::BatchResult result = faca::run_batch(config);
  print_aggregate(result);
  return result.exit_code();
}

int cmd_compare(const CommonFlags& f) {
  const faca::RunConfig config = make_config(f);
  std::vector<faca::PlannerKind> planners;
  for (const std::string& p : f.planners) planners.push_back(faca::parse_planner(p));
  std::vector<faca::NegotiatorKind> negotiators;
  for (const std::string& n : f.negotiators) negotiators.push_back(faca::parse_negotiator(n));
  const faca::Comparison cmp = faca::compare(faca::load_scenario(config.scenario_path), config, planners, negotiators);
  std::cout << cmp.table();
  return 0;
}

int cmd_render(const std::string& log_dir, std::string out) {
  const faca::TrajectoryLog log = faca::read_log(log_dir);
  if (out.empty()) out = (fs::path(log_dir) / faca::kFigureFile).string();
  faca::emit_svg(log, out);
  std::cout << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Force-field multi-robot collision avoidance with priority negotiation"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "Simulate one seed and print its metrics");
  add_common(run, run_flags, false);
  run->add_option("--out", run_flags.out, "Directory for log, metrics and figure");
  run_flags.figures = true;

  CommonFlags batch_flags;
  CLI::App* batch = app.add_subcommand("batch", "Simulate many seeds and aggregate");
  add_common(batch, batch_flags, false);
  batch->add_option("--out", batch_flags.out, "Directory for per-seed logs and aggregate.json");
  batch->add_option("--jobs", batch_flags.jobs, "Concurrent runs")->check(CLI::PositiveNumber);
  batch->add_flag("--figures", batch_flags.figures, "Write an SVG per seed");

  CommonFlags compare_flags;
  CLI::App* cmp = app.add_subcommand("compare", "Batch each planner and negotiator mode into one table");
  add_common(cmp, compare_flags, true);
  cmp->add_option("--out", compare_flags.out, "Directory for per-row logs and the comparison table");
  cmp->add_option("--jobs", compare_flags.jobs, "Concurrent runs")->check(CLI::PositiveNumber);

  std::string render_log;
  std::string render_out;
  CLI::App* render = app.add_subcommand("render", "Draw a stored log as SVG");
  render->add_option("--log", render_log, "Log directory written by run or batch")
      ->required()
      ->check(CLI::ExistingDirectory);
  render->add_option("--out", render_out, "SVG path (default: <log>/trajectory.svg)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_flags);
    if (*batch) return cmd_batch(batch_flags);
    if (*cmp) return cmd_compare(compare_flags);
    if (*render) return cmd_render(render_log, render_out);
  } catch (const faca::ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kUsageError;
  } catch (const faca::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
