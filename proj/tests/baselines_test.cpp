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

#include "regret_miner/baselines.hpp"

#include <cmath>
#include <optional>
#include <set>

#include <gtest/gtest.h>

#include "regret_miner/planner.hpp"
#include "regret_miner/predictor.hpp"
#include "regret_miner/simkit.hpp"

namespace regret_miner {
namespace {

ActionTraj Zeros(int n, int start_t = 0) {
  ActionTraj t;
  t.start_t = start_t;
  t.actions.assign(static_cast<std::size_t>(n), Action{});
  return t;
}

// A five-step scene with one replan. The robot sits still; `human_at` places
// a single human (or none) at every later frame.
SceneRecord HandScene(std::optional<Vec2> human_at) {
  SceneRecord s;
  s.scenario_id = "hand-000";
  s.family = "SparseCruise";
  s.context = DrivingCorridor{};
  const int n = 5;
  for (int k = 0; k <= n; ++k) {
    JointState j;
    j.t = k;
    if (human_at) {
      j.humans.push_back(k == 0 ? AgentState{} : AgentState{human_at->x, human_at->y, 0.0, 0.0});
    }
    s.states.push_back(j);
  }
  if (human_at) {
    s.footprints.humans = {kCarRadius};
    s.human_actions = {Zeros(n)};
  }
  s.executed_robot = {Zeros(n)};
  ReplanEntry e;
  e.candidates = {Zeros(n)};
  PredictionSet pred;
  if (human_at) pred.humans = {HumanPrediction{{{BehaviorMode::kStay, 1.0, Zeros(n)}}}};
  e.predicted_humans = {pred};
  e.candidate_rewards_predicted = {0.0};
  s.replan_log = {e};
  s.per_frame_collision_cost.assign(n + 1, 0.0);
  return s;
}

TEST(AdeSceneScore, ThreeFourFive) {
  const AdeScore a = AdeSceneScore(HandScene(Vec2{3.0, 4.0}));
  EXPECT_EQ(a.pairs, 1);
  EXPECT_DOUBLE_EQ(a.score, 5.0);
  EXPECT_DOUBLE_EQ(a.fde, 5.0);
}

TEST(AdeSceneScore, NoHumans) {
  const AdeScore a = AdeSceneScore(HandScene(std::nullopt));
  EXPECT_TRUE(a.no_humans);
  EXPECT_EQ(a.pairs, 0);
}

TEST(AdeSceneScore, OracleIsExact) {
  const ScenarioSpec spec = GenerateScenarioBatch(ScenarioFamily::kStoppedTraffic, 1, 3).front();
  const SceneRecord scene = RunClosedLoop(spec, PlannerHandle{}, OraclePredictor{}, 10);
  EXPECT_NEAR(AdeSceneScore(scene).score, 0.0, 1e-9);
}

TEST(AdeSceneScore, FlatAverageOverHumansAndReplans) {
  const ScenarioSpec spec = GenerateScenarioBatch(ScenarioFamily::kSparseCruise, 4, 9)[3];
  ASSERT_GE(spec.humans.size(), 1u);
  const SceneRecord scene =
      RunClosedLoop(spec, PlannerHandle{}, LearnedPredictor(PredictorParams{}), 10);
  double sum = 0.0;
  int pairs = 0;
  for (std::size_t r = 0; r < scene.replan_log.size(); ++r) {
    const ReplanEntry& e = scene.replan_log[r];
    const int steps = scene.executed_robot[r].size();
    for (int i = 0; i < scene.num_humans(); ++i) {
      const ModePrediction& m = e.predicted_humans[e.executed_index].humans[i].MostLikely();
      AgentState s = scene.states[e.t].humans[i];
      double err = 0.0;
      for (int k = 0; k < steps; ++k) {
        s = UnicycleStep(s, m.traj.actions[k], scene.dt);
        const AgentState& truth = scene.states[e.t + k + 1].humans[i];
        err += std::hypot(s.x - truth.x, s.y - truth.y);
      }
      sum += err / steps;
      ++pairs;
    }
  }
  const AdeScore a = AdeSceneScore(scene);
  EXPECT_EQ(a.pairs, pairs);
  EXPECT_NEAR(a.score, sum / pairs, 1e-12);
}

TEST(TrfdFlag, BelowSupportIsFlagged) {
  SceneRecord s = HandScene(std::nullopt);
  s.replan_log[0].predicted_reward_samples = {1.0, 2.0, 3.0};
  s.replan_log[0].predicted_reward_weights = {1.0, 1.0, 1.0};
  const TrfdResult r = TrfdFlag(s, 20.0);
  EXPECT_EQ(r.realized, 0.0);
  EXPECT_TRUE(r.flagged);
}

TEST(TrfdFlag, MedianIsNotFlagged) {
  SceneRecord s = HandScene(std::nullopt);
  s.replan_log[0].predicted_reward_samples = {-1.0, 0.0, 1.0};
  s.replan_log[0].predicted_reward_weights = {1.0, 1.0, 1.0};
  const TrfdResult r = TrfdFlag(s, 20.0);
  EXPECT_FALSE(r.flagged);
  EXPECT_EQ(r.quantile, -1.0);
  EXPECT_THROW(TrfdFlag(s, 0.0), Error);
}

TEST(TrfdFlag, InflatedAnticipationIsFlagged) {
  PlannerHandle hot;
  hot.anticipated_reward_offset = 2.5;
  for (const ScenarioSpec& spec : GenerateScenarioBatch(ScenarioFamily::kSparseCruise, 4, 2)) {
    const SceneRecord scene = RunClosedLoop(spec, hot, OraclePredictor{}, 10);
    EXPECT_TRUE(TrfdFlag(scene, 20.0).flagged) << spec.scenario_id;
  }
}

TEST(Overlap, Cases) {
  const std::set<std::string> a = {"a", "b", "c"};
  EXPECT_EQ(Overlap(a, a), 1.0);
  EXPECT_EQ(Overlap(a, {"x", "y"}), 0.0);
  std::set<std::string> twenty, seven;
  for (int i = 0; i < 20; ++i) twenty.insert("s" + std::to_string(i));
  for (int i = 0; i < 7; ++i) seven.insert("s" + std::to_string(i * 3));
  EXPECT_DOUBLE_EQ(Overlap(twenty, seven), 0.35);
  EXPECT_THROW(Overlap({}, a), Error);
}

TEST(MetricTag, NamesRoundTrip) {
  for (MetricTag t : {MetricTag::kGrm, MetricTag::kRm, MetricTag::kAde, MetricTag::kTrfd}) {
    EXPECT_EQ(ParseMetric(MetricName(t)), t);
  }
  EXPECT_THROW(ParseMetric("bleu"), Error);
}

}  // namespace
}  // namespace regret_miner
