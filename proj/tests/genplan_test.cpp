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

#include "regret_miner/genplan.hpp"

#include <cmath>
#include <map>
#include <random>

#include <gtest/gtest.h>

namespace regret_miner {
namespace {

double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// One robot step and one human step, with hand-set decoder statistics.
Codebook TinyCodebook(std::vector<std::vector<double>> means, double var) {
  Codebook cb;
  cb.K = static_cast<int>(means.size());
  cb.robot_len = 1;
  cb.human_len = 1;
  cb.encoder.assign(kCueBuckets * 2,
                    std::vector<double>(means.size(), 1.0 / static_cast<double>(means.size())));
  cb.mean = std::move(means);
  cb.var.assign(cb.mean.size(), std::vector<double>(2, var));
  return cb;
}

TEST(NavData, CueThresholds) {
  EXPECT_EQ(ClassifyCue(0.1), HumanClass::kLeft);
  EXPECT_EQ(ClassifyCue(0.5), HumanClass::kStraight);
  EXPECT_EQ(ClassifyCue(0.9), HumanClass::kRight);
  Rng rng(RngStream{1, 0});
  const NavGeometry geo;
  EXPECT_EQ(GenerateNavSample(geo, 0.1, NavGoal::kPrimary, 0.0, rng).outcome_class / 2,
            static_cast<int>(HumanClass::kLeft));
  EXPECT_EQ(GenerateNavSample(geo, 0.5, NavGoal::kPrimary, 0.0, rng).outcome_class / 2,
            static_cast<int>(HumanClass::kStraight));
}

TEST(NavData, HumanWalksTowardItsWaypoint) {
  const NavGeometry geo;
  std::vector<Vec2> left, right;
  SimulateHuman(geo, HumanClass::kLeft, nullptr, &left);
  SimulateHuman(geo, HumanClass::kRight, nullptr, &right);
  EXPECT_LT(left.back().y, -0.5);
  EXPECT_GT(right.back().y, 0.5);
}

TEST(NavData, Deterministic) {
  EXPECT_EQ(GenerateNavDataset(200, 0.05, RngStream{3, 0}),
            GenerateNavDataset(200, 0.05, RngStream{3, 0}));
  EXPECT_THROW(GenerateNavDataset(0, 0.05, RngStream{3, 0}), Error);
  EXPECT_THROW(GenerateNavDataset(10, -1.0, RngStream{3, 0}), Error);
}

TEST(Codebook, SingleClass) {
  std::vector<NavSample> data;
  Rng rng(RngStream{2, 0});
  for (int i = 0; i < 20; ++i) {
    NavSample s = GenerateNavSample(NavGeometry{}, 0.1, NavGoal::kPrimary, 0.0, rng);
    s.outcome_class = 0;
    data.push_back(s);
  }
  const Codebook cb = FitCodebook(data, 1);
  for (const auto& row : cb.encoder) EXPECT_EQ(row, std::vector<double>{1.0});
}

TEST(Codebook, MeansMatchPerClassAverages) {
  const auto data = GenerateNavDataset(3000, 0.05, RngStream{4, 0});
  const Codebook cb = FitCodebook(data, 6);
  EXPECT_EQ(cb, FitCodebook(data, 6));
  std::map<int, std::vector<long double>> sums;
  std::map<int, int> counts;
  for (const NavSample& s : data) {
    auto& v = sums[s.outcome_class];
    v.resize(12, 0.0L);
    for (int j = 0; j < 6; ++j) {
      v[j] += s.robot_traj[j];
      v[6 + j] += s.human_traj[j];
    }
    ++counts[s.outcome_class];
  }
  for (const auto& [k, v] : sums) {
    for (int d = 0; d < 12; ++d) {
      EXPECT_NEAR(cb.mean[k][d], static_cast<double>(v[d] / counts[k]), 1e-12);
    }
  }
  ValidateCodebook(cb);
}

TEST(Codebook, RejectsSparseClass) {
  auto data = GenerateNavDataset(50, 0.05, RngStream{4, 0});
  EXPECT_THROW(FitCodebook(data, 3), Error);
}

TEST(PlanGenerative, ZeroNoiseReturnsMean) {
  Codebook cb = TinyCodebook({{0.4, -0.2}}, 0.01);
  cb.noise_sigma = 0.0;
  const GenerativePlan p = PlanGenerative(cb, 0.5, NavGoal::kPrimary, RngStream{1, 0});
  EXPECT_EQ(p.code, 0);
  EXPECT_EQ(p.robot, NavTraj{0.4});
  EXPECT_EQ(p.anticipated_human, NavTraj{-0.2});
}

TEST(PlanGenerative, CodeFrequenciesFollowEncoder) {
  const Codebook cb = FitCodebook(GenerateNavDataset(4000, 0.05, RngStream{5, 0}), 6);
  const std::vector<double>& row = cb.EncoderRow(0.9, NavGoal::kPrimary);
  std::vector<double> freq(6, 0.0);
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    freq[PlanGenerative(cb, 0.9, NavGoal::kPrimary, RngStream{6, static_cast<std::uint64_t>(i)}).code] += 1.0 / n;
  }
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(freq[k], row[k], 0.02);
  EXPECT_EQ(PlanGenerative(cb, 0.9, NavGoal::kPrimary, RngStream{6, 1}).robot,
            PlanGenerative(cb, 0.9, NavGoal::kPrimary, RngStream{6, 1}).robot);
}

TEST(KdeWindowMass, SingleSample) {
  const double h = 0.2;
  for (double delta : {0.05, 0.2, 0.7}) {
    EXPECT_NEAR(KdeWindowMass(std::vector<double>{1.5}, h, 1.5, delta),
                2.0 * Phi(delta / h) - 1.0, 1e-12);
  }
}

TEST(KdeWindowMass, WideWindowHoldsAllMass) {
  const std::vector<double> xs = {-1.0, 0.0, 0.3, 2.0};
  const double h = 0.3;
  EXPECT_GE(KdeWindowMass(xs, h, 0.5, 10.0 * (3.0 + h)), 0.999);
}

TEST(KdeWindowMass, MatchesQuadrature) {
  std::mt19937_64 gen(77);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> xs(50);
  for (double& x : xs) x = n(gen);
  const double h = 0.25, c = 0.4, delta = 0.6;
  // Trapezoid rule on a fine grid.
  const int steps = 200000;
  const double a = c - delta, dx = 2.0 * delta / steps;
  auto density = [&](double x) {
    double s = 0.0;
    for (double xi : xs) s += std::exp(-0.5 * (x - xi) * (x - xi) / (h * h));
    return s / (xs.size() * h * std::sqrt(2.0 * kPi));
  };
  double total = 0.5 * (density(a) + density(a + 2.0 * delta));
  for (int i = 1; i < steps; ++i) total += density(a + i * dx);
  EXPECT_NEAR(KdeWindowMass(xs, h, c, delta), total * dx, 1e-6);
  EXPECT_THROW(KdeWindowMass(std::vector<double>{}, h, c, delta), Error);
  EXPECT_THROW(KdeWindowMass(xs, 0.0, c, delta), Error);
}

TEST(SilvermanBandwidth, Formula) {
  const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
  const double sd = std::sqrt(5.0 / 3.0);
  EXPECT_NEAR(SilvermanBandwidth(xs), 1.06 * sd * std::pow(4.0, -0.2), 1e-12);
}

TEST(CounterfactualProb, SingleCodeIsDecoderMass) {
  const Codebook cb = TinyCodebook({{0.0, 0.0}}, 0.04);
  const KdeMixture mix = SampleMixture(cb, KdeSettings{}, RngStream{8, 0});
  const std::vector<double> robot = {0.1}, human = {-0.05};
  const double want = KdeWindowMass(mix.samples[0][0], mix.bandwidth[0][0], 0.1, 0.1);
  EXPECT_NEAR(CounterfactualProb(cb, mix, robot, human, 0.5, NavGoal::kPrimary, 0.1),
              want, 1e-12);
}

TEST(CounterfactualProb, PosteriorFollowsObservedHuman) {
  const Codebook cb = TinyCodebook({{0.0, 0.0}, {5.0, 5.0}}, 0.01);
  const KdeMixture mix = SampleMixture(cb, KdeSettings{}, RngStream{8, 0});
  const std::vector<double> human = {0.0};
  const auto post = CodePosterior(cb, mix, human, 0.5, NavGoal::kPrimary, 0.1);
  EXPECT_GT(post[0], 0.95);
  const std::vector<double> far = {100.0};
  EXPECT_THROW(CodePosterior(cb, mix, far, 0.5, NavGoal::kPrimary, 0.1), Error);
}

TEST(CounterfactualProb, PartitionSumsToOne) {
  const Codebook cb = TinyCodebook({{0.0, 0.0}, {1.0, 0.2}}, 0.09);
  const KdeSettings settings;
  const KdeMixture mix = SampleMixture(cb, settings, RngStream{9, 0});
  const std::vector<double> human = {0.1};
  const double delta = 0.05;
  double total = 0.0;
  for (double c = -3.0; c < 4.0; c += 2.0 * delta) {
    const std::vector<double> robot = {c};
    total += CounterfactualProb(cb, mix, robot, human, 0.5, NavGoal::kPrimary, delta);
  }
  EXPECT_NEAR(total, 1.0, 0.05);
}

TEST(GenerativeRegret, ExecutedBestIsZero) {
  const Codebook cb = TinyCodebook({{0.0, 0.0}}, 0.04);
  const std::vector<NavTraj> candidates = {{0.0}, {3.0}};
  const std::vector<double> human = {0.0};
  const auto best = GenerativeRegret(cb, candidates, 0, human, 0.5, NavGoal::kPrimary,
                                     KdeSettings{}, RngStream{1, 0});
  EXPECT_EQ(best.regret, 0.0);
  EXPECT_EQ(best.argmax_candidate, 0);
  const auto worst = GenerativeRegret(cb, candidates, 1, human, 0.5, NavGoal::kPrimary,
                                      KdeSettings{}, RngStream{1, 0});
  EXPECT_GT(worst.regret, 0.0);
  EXPECT_LE(worst.regret, 1.0);
}

TEST(NavFixtures, CollisionStandsOut) {
  const Codebook cb = FitCodebook(GenerateNavDataset(6000, 0.05, RngStream{10, 0}), 6);
  const KdeSettings kde;
  const RngStream s{10, 1};
  const double nominal = RunNavFixture(cb, NavFixtureKind::kNominal, kde, s).regret;
  const double irrelevant = RunNavFixture(cb, NavFixtureKind::kIrrelevant, kde, s).regret;
  const NavDeployment collision = RunNavFixture(cb, NavFixtureKind::kCollision, kde, s);
  EXPECT_LT(nominal, 0.15);
  EXPECT_LT(irrelevant, 0.15);
  EXPECT_GT(collision.regret, nominal);
  EXPECT_GT(collision.regret, irrelevant);
  EXPECT_EQ(collision.actual, HumanClass::kRight);
  EXPECT_EQ(collision.anticipated, HumanClass::kStraight);
}

TEST(Sensor, PerfectSensorReportsTruth) {
  Rng rng(RngStream{1, 0});
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(Sense(SensorModel{}, true, rng), 1);
    EXPECT_EQ(Sense(SensorModel{}, false, rng), 0);
  }
  SensorModel stuck;
  stuck.injected_fault = 0;
  EXPECT_EQ(Sense(stuck, true, rng), 0);
  SensorModel bad;
  bad.detect_true_positive = 1.5;
  EXPECT_THROW(Sense(bad, true, rng), Error);
}

TEST(Perception, FaultsCostMore) {
  const auto results = PerceptionCaseStudy(SensorModel{}, 100, RngStream{12, 0});
  ASSERT_EQ(results.size(), 4u);
  std::map<std::string, double> r;
  for (const auto& x : results) r[x.tag] = x.regret;
  for (const char* good : {"obstacle_detected", "empty_clear"}) {
    EXPECT_LT(r[good], 0.1);
    for (const char* bad : {"obstacle_missed", "empty_false_alarm"}) {
      EXPECT_GT(r[bad], r[good]);
    }
  }
}

}  // namespace
}  // namespace regret_miner
