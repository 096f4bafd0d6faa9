#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "faca/batch.hpp"
#include "mock_chat_service.hpp"

namespace faca {
namespace {

namespace fs = std::filesystem;

const fs::path kScenarios{FACA_SCENARIO_DIR};

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("faca_batch_test_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

RunConfig config_for(const std::string& scenario, const std::string& seeds) {
  RunConfig config;
  config.scenario_path = kScenarios / scenario;
  config.seeds = parse_seed_list(seeds);
  return config;
}

TEST(SeedList, Examples) {
  EXPECT_EQ(parse_seed_list("7"), (std::vector<std::uint64_t>{7}));
  EXPECT_EQ(parse_seed_list("1-3,10"), (std::vector<std::uint64_t>{1, 2, 3, 10}));
  EXPECT_EQ(parse_seed_list("1-100").size(), 100u);
  EXPECT_EQ(parse_seed_list(" 4 , 5-5 "), (std::vector<std::uint64_t>{4, 5}));
  for (const char* bad : {"", "x", "3-1", "1-", "1,,2", "-4", "0-99999999"}) {
    try {
      parse_seed_list(bad);
      ADD_FAILURE() << "accepted '" << bad << "'";
    } catch (const ValidationError& e) {
      EXPECT_EQ(e.field(), "seeds");
    }
  }
}

TEST(Summary, MeanAndSampleDeviation) {
  const Summary s = summarize({2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0});
  EXPECT_DOUBLE_EQ(s.mean, 5.0);
  EXPECT_NEAR(s.stddev, std::sqrt(32.0 / 7.0), 1e-12);
  EXPECT_EQ(s.count, 8u);
  EXPECT_EQ(summarize({3.0}).stddev, 0.0);
  EXPECT_EQ(summarize({}).count, 0u);
}

TEST(RunBatch, SingleSeedMatchesDirectRun) {
  const RunConfig config = config_for("circle_n4.json", "3");
  const BatchResult batch = run_batch(config);
  ASSERT_EQ(batch.per_seed.size(), 1u);
  ASSERT_TRUE(batch.per_seed[0].report);
  const MetricsReport direct = compute_metrics(run(configure(load_scenario(config.scenario_path), config, 3)));
  EXPECT_EQ(to_json(*batch.per_seed[0].report).dump(), to_json(direct).dump());
  EXPECT_EQ(batch.aggregate.runs, 1u);
  EXPECT_EQ(batch.aggregate.ttg_mean.mean, direct.ttg_mean);
  EXPECT_EQ(batch.exit_code(), 0);
}

TEST(RunBatch, ParallelMatchesSerial) {
  RunConfig config = config_for("circle_n4.json", "1-6");
  const BatchResult serial = run_batch(config);
  config.jobs = 3;
  const BatchResult parallel = run_batch(config);
  EXPECT_EQ(to_json(parallel.aggregate).dump(), to_json(serial.aggregate).dump());
  for (std::size_t k = 0; k < serial.per_seed.size(); ++k) {
    EXPECT_EQ(parallel.per_seed[k].seed, serial.per_seed[k].seed);
    EXPECT_EQ(to_json(*parallel.per_seed[k].report).dump(), to_json(*serial.per_seed[k].report).dump());
  }
}

TEST(RunBatch, WritesArtifacts) {
  TempDir tmp;
  RunConfig config = config_for("gap_n4.json", "1-2");
  config.out_dir = tmp.path();
  config.write_figures = true;
  run_batch(config);
  for (const char* seed : {"seed_1", "seed_2"}) {
    for (const char* file : {kLogFile, kTrajectoryFile, kMetricsFile, kFigureFile}) {
      EXPECT_TRUE(fs::exists(tmp.path() / seed / file)) << seed << "/" << file;
    }
  }
  const auto aggregate = nlohmann::json::parse(read_file(tmp.path() / "aggregate.json"));
  EXPECT_EQ(aggregate.at("format_version"), kFormatVersion);
  EXPECT_EQ(aggregate.at("runs"), 2);
  EXPECT_TRUE(aggregate.at("failures").empty());
}

TEST(RunBatch, FailuresAreRecordedNotThrown) {
  RunConfig config = config_for("circle_n4.json", "1-2");
  config.negotiator = NegotiatorKind::kLlm;
  const BatchResult batch = run_batch(config, [](const ChatEndpoint&) -> std::unique_ptr<ChatClient> {
    throw TransportError("no service");
  });
  EXPECT_EQ(batch.aggregate.errors, 2u);
  EXPECT_NE(batch.exit_code(), 0);
  EXPECT_FALSE(batch.per_seed[0].error.empty());
}

TEST(RunBatch, LlmModeUsesFactory) {
  RunConfig config = config_for("circle_n4.json", "1");
  config.negotiator = NegotiatorKind::kLlm;
  int made = 0;
  const BatchResult batch = run_batch(config, [&made](const ChatEndpoint&) -> std::unique_ptr<ChatClient> {
    ++made;
    return std::make_unique<testing::MockChatService>(testing::MockMode::kNeverAgree);
  });
  EXPECT_EQ(made, 1);
  EXPECT_EQ(batch.exit_code(), 0);
  EXPECT_GT(batch.per_seed[0].report->negotiations, 0u);
}

TEST(RunBatch, RejectsEmptySeedsAndJobs) {
  RunConfig config = config_for("circle_n4.json", "1");
  config.jobs = 0;
  EXPECT_THROW(run_batch(config), ValidationError);
  config.jobs = 1;
  config.seeds.clear();
  EXPECT_THROW(run_batch(config), ValidationError);
}

TEST(Compare, OneRowPerPlannerAndMode) {
  TempDir tmp;
  RunConfig config = config_for("gap_n4.json", "1-2");
  config.out_dir = tmp.path();
  const Scenario base = load_scenario(config.scenario_path);
  const Comparison two = compare(base, config, {PlannerKind::kFaca, PlannerKind::kClassicalApf}, {});
  ASSERT_EQ(two.rows.size(), 2u);
  EXPECT_TRUE(two.table().starts_with("planner,negotiator,runs,errors,ttg_mean,mmd_robot,flow_rate\n"));
  EXPECT_TRUE(fs::exists(tmp.path() / "comparison.csv"));
  EXPECT_TRUE(fs::exists(tmp.path() / "faca_scripted" / "aggregate.json"));
  const auto j = nlohmann::json::parse(read_file(tmp.path() / "comparison.json"));
  EXPECT_EQ(j.at("rows").size(), 2u);

  config.out_dir.clear();
  const Comparison three =
      compare(base, config, {PlannerKind::kFaca, PlannerKind::kClassicalApf, PlannerKind::kMpc}, {});
  EXPECT_EQ(three.rows.size(), 3u);
  const Comparison modes = compare(base, config, {PlannerKind::kFaca, PlannerKind::kMpc},
                                   {NegotiatorKind::kNone, NegotiatorKind::kScripted});
  EXPECT_EQ(modes.rows.size(), 4u);
  EXPECT_THROW(compare(base, config, {PlannerKind::kFaca}, {}), InvalidArgument);
}

}  // namespace
}  // namespace faca
