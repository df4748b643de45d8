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

#include "regret_miner/regret.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "regret_miner/planner.hpp"
#include "regret_miner/predictor.hpp"
#include "regret_miner/simkit.hpp"

namespace regret_miner {
namespace {

TEST(Softmax, Examples) {
  EXPECT_EQ(SoftmaxLikelihoods(std::vector<double>{1.0, 1.0}),
            (std::vector<double>{0.5, 0.5}));
  const auto p = SoftmaxLikelihoods(std::vector<double>{0.0, std::log(3.0)});
  EXPECT_NEAR(p[0], 0.25, 1e-15);
  EXPECT_NEAR(p[1], 0.75, 1e-15);
}

TEST(Softmax, MatchesDirectNormalization) {
  const std::vector<double> r = {2.3, 5.1, -1.0, 0.4};
  double z = 0.0;
  for (double x : r) z += std::exp(x);
  const auto p = SoftmaxLikelihoods(r);
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(p[i], std::exp(r[i]) / z, 1e-12);
}

TEST(Softmax, RejectsBadInput) {
  EXPECT_THROW(SoftmaxLikelihoods(std::vector<double>{}), Error);
  try {
    SoftmaxLikelihoods(std::vector<double>{1.0, INFINITY});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFinite);
  }
}

TEST(CanonicalRegret, Examples) {
  EXPECT_DOUBLE_EQ(CanonicalRegretFromRewards(std::vector<double>{10.0, 7.0}, 1), 3.0);
  EXPECT_DOUBLE_EQ(CanonicalRegretFromRewards(std::vector<double>{10.0, 7.0}, 0), 0.0);
  EXPECT_DOUBLE_EQ(CanonicalRegretFromRewards(std::vector<double>{20.0, 14.0}, 1), 6.0);
  EXPECT_THROW(CanonicalRegretFromRewards(std::vector<double>{1.0}, 1), Error);
}

TEST(GeneralizedRegret, Examples) {
  const std::vector<double> l = {0.7, 0.2, 0.1};
  EXPECT_NEAR(GeneralizedRegretFromLikelihoods(l, 2), 0.6, 1e-15);
  EXPECT_EQ(GeneralizedRegretFromLikelihoods(l, 0), 0.0);
}

TEST(GeneralizedRegret, ShiftInvariant) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> r(7), s(7);
    for (double& x : r) x = u(gen);
    const double c = u(gen) * 10.0;
    for (std::size_t i = 0; i < r.size(); ++i) s[i] = r[i] + c;
    const int e = t % 7;
    EXPECT_NEAR(GeneralizedRegretFromLikelihoods(SoftmaxLikelihoods(r), e),
                GeneralizedRegretFromLikelihoods(SoftmaxLikelihoods(s), e), 1e-9);
  }
}

SceneRecord OracleScene(ScenarioFamily family, std::uint64_t seed) {
  const ScenarioSpec spec = GenerateScenarioBatch(family, 1, seed).front();
  return RunClosedLoop(spec, PlannerHandle{}, OraclePredictor{}, 10);
}

TEST(ScoreScene, Aggregates) {
  SceneRecord scene = OracleScene(ScenarioFamily::kSparseCruise, 2);
  const RegretReport mean = ScoreScene(LuceShepardModel{}, scene, Aggregation::kMean);
  const RegretReport worst = ScoreScene(LuceShepardModel{}, scene, Aggregation::kWorst);
  ASSERT_EQ(mean.per_t.size(), scene.replan_log.size());
  double sum = 0.0, top = 0.0;
  for (const RegretStep& s : mean.per_t) {
    sum += s.regret;
    top = std::max(top, s.regret);
  }
  EXPECT_NEAR(mean.score(), sum / mean.per_t.size(), 1e-15);
  EXPECT_EQ(worst.score(), top);
}

TEST(ScoreScene, MeanAndWorstArithmetic) {
  // Three replans whose likelihood gaps are 0.1, 0.3 and 0.2.
  RegretReport r;
  for (double g : {0.1, 0.3, 0.2}) r.per_t.push_back({0, 0.0, 0.0, g});
  double sum = 0.0;
  for (const auto& s : r.per_t) {
    sum += s.regret;
    r.worst_regret = std::max(r.worst_regret, s.regret);
  }
  r.mean_regret = sum / 3.0;
  EXPECT_NEAR(r.score(), 0.2, 1e-15);
  r.aggregation = Aggregation::kWorst;
  EXPECT_EQ(r.score(), 0.3);
}

TEST(ScoreScene, OracleSceneHasNoRegret) {
  const SceneRecord scene = OracleScene(ScenarioFamily::kStrandedTruck, 5);
  const RegretReport r = ScoreScene(LuceShepardModel{}, scene);
  EXPECT_NEAR(r.mean_regret, 0.0, 1e-9);
  const RegretReport again = ScoreScene(LuceShepardModel{}, scene);
  EXPECT_EQ(r.mean_regret, again.mean_regret);
  EXPECT_EQ(r.canonical_per_t, again.canonical_per_t);
}

TEST(ScoreScene, RejectsGenerativeModel) {
  const SceneRecord scene = OracleScene(ScenarioFamily::kSparseCruise, 2);
  EXPECT_THROW(ScoreScene(GenerativeKdeModel{}, scene), Error);
  SceneRecord empty = scene;
  empty.replan_log.clear();
  EXPECT_THROW(ScoreScene(LuceShepardModel{}, empty), Error);
}

std::vector<ScoredId> Ids(const std::vector<double>& v) {
  std::vector<ScoredId> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back({"s" + std::to_string(i), v[i]});
  return out;
}

TEST(MineTopQuantile, Counting) {
  EXPECT_EQ(QuantileCount(96, 20.0), 20);
  EXPECT_EQ(QuantileCount(10, 20.0), 2);
  EXPECT_EQ(QuantileCount(76, 20.0), 16);
  EXPECT_THROW(QuantileCount(10, 0.0), Error);
  EXPECT_THROW(QuantileCount(10, 100.0), Error);
  const auto mined =
      MineTopQuantile(Ids({0.1, 0.9, 0.3, 0.2, 0.8, 0.05, 0.4, 0.35, 0.15, 0.25}), 20.0);
  EXPECT_EQ(mined, (std::vector<std::string>{"s1", "s4"}));
}

TEST(MineTopQuantile, TiesGoToSmallestIds) {
  const auto mined = MineTopQuantile(Ids({0.5, 0.5, 0.5, 0.5, 0.5}), 40.0);
  EXPECT_EQ(mined, (std::vector<std::string>{"s0", "s1"}));
}

TEST(MineTopQuantile, RejectsNan) {
  EXPECT_THROW(MineTopQuantile(Ids({0.1, std::nan("")}), 50.0), Error);
  EXPECT_THROW(MineTopQuantile(std::vector<ScoredId>{}, 50.0), Error);
}

TEST(CalibrationPair, SeparatesGeneralizedRegret) {
  const CalibrationPair pair = BuildCalibrationPair();
  const double gap = std::abs(pair.a.canonical - pair.b.canonical) /
                     std::max(pair.a.canonical, pair.b.canonical);
  EXPECT_LT(gap, 0.05);
  EXPECT_GE(pair.a.generalized, 1.5 * pair.b.generalized);
  // Swapping the labels flips the ordering.
  EXPECT_FALSE(pair.b.generalized >= 1.5 * pair.a.generalized);
  EXPECT_LT(pair.b.generalized, pair.a.generalized);
}

}  // namespace
}  // namespace regret_miner
