// Copyright 2026 The regret_miner Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "regret_miner/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "regret_miner/serialize.hpp"

namespace regret_miner {
namespace {

ExperimentConfig SmallConfig() {
  ExperimentConfig c;
  c.families = {{ScenarioFamily::kStrandedTruck, 4}, {ScenarioFamily::kIntersection, 3},
                {ScenarioFamily::kSparseCruise, 3}};
  c.horizon = 80;
  c.pretrain_per_family = 3;
  c.seeds = {0, 1};
  return c;
}

std::vector<ScoredId> RandomScores(int n, std::uint64_t seed) {
  Rng rng(RngStream{seed, 0});
  std::vector<ScoredId> out;
  for (int i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "s%03d", i);
    out.push_back({id, rng.Uniform()});
  }
  return out;
}

std::set<std::string> AsSet(const std::vector<std::string>& v) {
  return {v.begin(), v.end()};
}

TEST(Config, JsonRoundTrip) {
  ExperimentConfig c = SmallConfig();
  c.p = 25.0;
  c.planner.weights.collision = -50.0;
  c.aggregation = Aggregation::kWorst;
  EXPECT_EQ(ConfigFromJson(ConfigToJson(c)), c);
  EXPECT_EQ(ConfigFromJson("{}"), ExperimentConfig{});
}

TEST(Config, Rejects) {
  EXPECT_THROW(ConfigFromJson(R"({"familes": []})"), Error);
  EXPECT_THROW(ConfigFromJson(R"({"regret": {"p": 20, "extra": 1}})"), Error);
  EXPECT_THROW(ConfigFromJson(R"({"families": []})"), Error);
  EXPECT_THROW(ConfigFromJson(R"({"regret": {"p": 120}})"), Error);
  EXPECT_THROW(ConfigFromJson("[1, 2]"), Error);
  ExperimentConfig c;
  c.seeds = {1, 1};
  EXPECT_THROW(ValidateConfig(c), Error);
}

TEST(Config, HashIgnoresOutputDir) {
  ExperimentConfig a, b;
  b.output_dir = "elsewhere";
  EXPECT_EQ(ConfigHash(a), ConfigHash(b));
  b.scenario_seed = 2;
  EXPECT_NE(ConfigHash(a), ConfigHash(b));
  EXPECT_EQ(ConfigHash(a).size(), 16u);
}

TEST(Deployment, DefaultConfigHas96Scenes) {
  const auto specs = DeploymentSpecs(ExperimentConfig{});
  EXPECT_EQ(specs.size(), 96u);
  std::set<std::string> ids;
  for (const auto& s : specs) ids.insert(s.scenario_id);
  EXPECT_EQ(ids.size(), 96u);
}

TEST(Deployment, RerunIsIdenticalAndReadable) {
  const ExperimentConfig config = SmallConfig();
  const Deployment a = Deploy(config);
  EXPECT_EQ(a.scenes.size(), 10u);
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "regret_miner_harness_test";
  fs::remove_all(root);
  WriteDeployment(a, (root / "a").string());
  WriteDeployment(Deploy(config), (root / "b").string());
  for (const char* f : {"config.json", "base_predictor.json", "scenes.jsonl"}) {
    EXPECT_EQ(ReadFile((root / "a" / f).string()), ReadFile((root / "b" / f).string())) << f;
  }
  auto manifest = [&](const char* d) {
    auto j = nlohmann::json::parse(ReadFile((root / d / "manifest.json").string()));
    EXPECT_TRUE(j.contains("created_at"));
    j.erase("created_at");
    return j;
  };
  EXPECT_EQ(manifest("a"), manifest("b"));
  const Deployment back = ReadDeployment((root / "a").string());
  EXPECT_EQ(back.config, config);
  EXPECT_EQ(back.base, a.base);
  ASSERT_EQ(back.scenes.size(), a.scenes.size());
  EXPECT_EQ(back.scenes[3].states, a.scenes[3].states);
  fs::remove_all(root);
}

TEST(Subsets, DefaultArithmetic) {
  const auto scores = RandomScores(96, 1);
  const Subsets s = BuildSubsets(scores, 20.0, HoldoutRule{}, 0, RngStream{1, 77});
  EXPECT_EQ(s.high.size(), 20u);
  EXPECT_EQ(s.holdout_high.size(), 4u);
  EXPECT_EQ(s.pool_high.size(), 16u);
  EXPECT_EQ(s.holdout_low.size(), 16u);
  EXPECT_EQ(s.pool_low.size(), 16u);
  EXPECT_EQ(s.pool_random.size(), 16u);
  EXPECT_EQ(s.pool_all.size(), 76u);
  std::set<std::string> high = AsSet(s.high);
  for (const auto& id : s.holdout_high) EXPECT_TRUE(high.count(id));
  for (const auto& id : s.pool_low) EXPECT_FALSE(high.count(id));
}

TEST(Subsets, PoolsNeverTouchHoldouts) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto scores = RandomScores(40 + static_cast<int>(seed), seed);
    const Subsets s = BuildSubsets(scores, 20.0, HoldoutRule{}, 0, RngStream{seed, 77});
    std::set<std::string> held = AsSet(s.holdout_high);
    held.insert(s.holdout_low.begin(), s.holdout_low.end());
    for (const auto* pool : {&s.pool_random, &s.pool_all, &s.pool_high, &s.pool_low}) {
      for (const auto& id : *pool) EXPECT_FALSE(held.count(id)) << id;
    }
    EXPECT_EQ(AsSet(s.pool_random).size(), s.pool_random.size());
  }
}

TEST(Subsets, Deterministic) {
  const auto scores = RandomScores(50, 3);
  const Subsets a = BuildSubsets(scores, 20.0, HoldoutRule{}, 0, RngStream{5, 77});
  const Subsets b = BuildSubsets(scores, 20.0, HoldoutRule{}, 0, RngStream{5, 77});
  EXPECT_EQ(SubsetsToJson(a), SubsetsToJson(b));
  const Subsets c = BuildSubsets(scores, 20.0, HoldoutRule{}, 0, RngStream{6, 77});
  EXPECT_NE(SubsetsToJson(a), SubsetsToJson(c));
  EXPECT_THROW(BuildSubsets(scores, 20.0, HoldoutRule{}, 1000, RngStream{5, 77}), Error);
}

SceneRecord CostScene(std::vector<double> per_frame) {
  SceneRecord s;
  s.aborted = true;
  for (std::size_t k = 0; k < per_frame.size(); ++k) {
    JointState j;
    j.t = static_cast<int>(k);
    s.states.push_back(j);
  }
  s.per_frame_collision_cost = std::move(per_frame);
  return s;
}

TEST(SplitMetrics, Severity) {
  const std::vector<SceneRecord> one = {CostScene({0.0, 2.0, 2.0, 2.0, 2.0, 2.0})};
  const SplitMetrics m = ComputeSplitMetrics(one, RewardWeights{});
  EXPECT_DOUBLE_EQ(m.collision_cost, 10.0);
  EXPECT_DOUBLE_EQ(m.collision_severity, 2.0);
  const std::vector<SceneRecord> clean = {CostScene({0.0, 0.0}), CostScene({0.0})};
  EXPECT_EQ(ComputeSplitMetrics(clean, RewardWeights{}).collision_severity, 0.0);
}

TEST(Stats, SummarizeAndMedian) {
  const MetricStats s = Summarize({1.0, 2.0, 6.0});
  EXPECT_DOUBLE_EQ(s.mean, 3.0);
  EXPECT_NEAR(s.stddev, std::sqrt(7.0), 1e-12);
  EXPECT_EQ(Summarize({4.0}).stddev, 0.0);
  EXPECT_EQ(Median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(Median({4.0, 1.0, 2.0, 3.0}), 2.5);
}

TEST(CaseStudy, RefitOnOwnDataDoesNotRaiseRegret) {
  ExperimentConfig config = SmallConfig();
  const Deployment d = Deploy(config);
  const LuceShepardModel model{config.planner.weights};
  auto mean_regret = [&](const std::vector<SceneRecord>& scenes) {
    double sum = 0.0;
    for (const auto& r : ScoreScenes(scenes, model, Aggregation::kMean)) sum += r.mean_regret;
    return sum / static_cast<double>(scenes.size());
  };
  const PredictorParams refit =
      Fit(d.scenes, d.base, {FitOptions::Kind::kFinetune, 1.0});
  const auto again = RunScenes(d.specs, config.planner, LearnedPredictor(refit),
                               config.replan_every);
  EXPECT_LE(mean_regret(again), mean_regret(d.scenes) + 1e-12);
}

TEST(CaseStudy, ReportShape) {
  ExperimentConfig config = SmallConfig();
  const Deployment d = Deploy(config);
  const auto reports =
      ScoreScenes(d.scenes, LuceShepardModel{config.planner.weights}, config.aggregation);
  const Subsets subsets = SubsetsFor(config, ScoresOf(reports));
  const CaseStudyReport r =
      FinetuneAndRedeploy(config, d.specs, d.scenes, d.base, subsets, kAllArms);
  EXPECT_EQ(r.seeds, config.seeds);
  EXPECT_EQ(r.arms.size(), kAllArms.size());
  for (Arm arm : kAllArms) {
    for (Split split : kSplits) {
      for (CaseMetric m : kCaseMetrics) {
        const MetricStats& s = r.At(arm, split, m);
        EXPECT_EQ(s.per_seed.size(), config.seeds.size());
        EXPECT_TRUE(std::isfinite(s.mean));
      }
    }
  }
}

TEST(CompareMetrics, DiagonalIsOne) {
  ExperimentConfig config = SmallConfig();
  const Deployment d = Deploy(config);
  const std::vector<MetricTag> tags = {MetricTag::kGrm, MetricTag::kRm, MetricTag::kAde};
  const Comparison c = CompareMetrics(d.scenes, tags, 20.0, config.planner.weights);
  ASSERT_EQ(c.labelings.size(), 3u);
  for (std::size_t a = 0; a < 3; ++a) {
    EXPECT_EQ(c.labelings[a].mined.size(), 2u);
    EXPECT_EQ(c.overlap[a][a], 1.0);
  }
}

TEST(Arms, NamesRoundTrip) {
  for (Arm a : kAllArms) EXPECT_EQ(ParseArm(ArmName(a)), a);
  for (Split s : kSplits) EXPECT_EQ(ParseSplit(SplitName(s)), s);
  for (CaseMetric m : kCaseMetrics) EXPECT_EQ(ParseCaseMetric(CaseMetricName(m)), m);
  EXPECT_THROW(ParseArm("medium"), Error);
}

}  // namespace
}  // namespace regret_miner
