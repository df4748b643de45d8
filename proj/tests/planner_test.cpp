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

#include "regret_miner/planner.hpp"

#include <gtest/gtest.h>

#include "regret_miner/predictor.hpp"
#include "regret_miner/simkit.hpp"
#include "regret_miner/world.hpp"

namespace regret_miner {
namespace {

ActionTraj Constant(double accel, int n) {
  ActionTraj t;
  t.actions.assign(static_cast<std::size_t>(n), Action{accel, 0.0});
  return t;
}

TEST(SampleCandidates, LibrarySize) {
  const PlannerHandle handle;
  EXPECT_EQ(handle.n_candidates(), 13);
  const auto c = SampleCandidates(handle, {0.0, 0.0, 0.0, 10.0}, DrivingCorridor{},
                                  RngStream{1, 0}, 40);
  EXPECT_EQ(c.size(), 13u);
  for (const ActionTraj& t : c) EXPECT_EQ(t.size(), 40);
}

TEST(SampleCandidates, Deterministic) {
  const PlannerHandle handle;
  const AgentState s{0.0, 1.0, 0.1, 8.0};
  EXPECT_EQ(SampleCandidates(handle, s, DrivingCorridor{}, RngStream{9, 3}, 30),
            SampleCandidates(handle, s, DrivingCorridor{}, RngStream{9, 3}, 30));
  EXPECT_NE(SampleCandidates(handle, s, DrivingCorridor{}, RngStream{9, 3}, 30),
            SampleCandidates(handle, s, DrivingCorridor{}, RngStream{9, 4}, 30));
}

TEST(SampleCandidates, RespectBounds) {
  PlannerHandle handle;
  handle.two_stage = true;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (const AgentState& s : {AgentState{0.0, 0.0, 0.0, 10.0},
                                AgentState{5.0, 3.7, 0.2, 2.0},
                                AgentState{0.0, -1.0, -0.3, 0.0}}) {
      for (const ActionTraj& t :
           SampleCandidates(handle, s, DrivingCorridor{}, RngStream{seed, 0}, 40)) {
        EXPECT_TRUE(WithinBounds(t, handle.bounds));
      }
    }
  }
}

TEST(Reward, MaintainAtRestIsZero) {
  JointState joint;
  joint.robot = {0.0, 0.0, 0.0, 0.0};
  const double r = Reward(RewardWeights{}, Constant(0.0, 20), {}, joint,
                          DrivingCorridor{}, Footprints{}, 0.1);
  EXPECT_DOUBLE_EQ(r, 0.0);
}

TEST(Reward, ProgressOnly) {
  JointState joint;
  joint.robot = {0.0, 0.0, 0.0, 10.0};
  const double r = Reward(RewardWeights{}, Constant(0.0, 10), {}, joint,
                          DrivingCorridor{}, Footprints{}, 0.1);
  EXPECT_NEAR(r, 10.0, 1e-12);
}

TEST(Reward, DrivingThroughHumanIsWorse) {
  JointState joint;
  joint.robot = {0.0, 0.0, 0.0, 0.0};
  joint.humans = {{4.0, 0.0, 0.0, 0.0}};
  Footprints fp;
  fp.humans = {kCarRadius};
  const std::vector<ActionTraj> humans = {Constant(0.0, 40)};
  const double go = Reward(RewardWeights{}, Constant(2.0, 40), humans, joint,
                           DrivingCorridor{}, fp, 0.1);
  const double stay = Reward(RewardWeights{}, Constant(0.0, 40), humans, joint,
                             DrivingCorridor{}, fp, 0.1);
  EXPECT_LT(go, stay);
  const RewardTerms terms = ComputeRewardTerms(Constant(2.0, 40), humans, joint,
                                               DrivingCorridor{}, fp, 0.1);
  EXPECT_GT(terms.collision, 0.0);
}

TEST(ArgmaxLowestIndex, TieBreak) {
  const std::vector<double> v = {1.0, 3.0, 3.0, 2.0};
  EXPECT_EQ(ArgmaxLowestIndex(v), 1);
  EXPECT_EQ(ArgmaxLowestIndex(std::vector<double>{-1.0}), 0);
}

TEST(ChooseCandidate, SingleCandidate) {
  JointState joint;
  joint.robot = {0.0, 0.0, 0.0, 5.0};
  const Context ctx = DrivingCorridor{};
  const Footprints fp;
  const PlanResult r = ChooseCandidate(PlannerHandle{}, LearnedPredictor(PredictorParams{}),
                                       {Constant(0.5, 40)}, {joint, {}, ctx, fp});
  EXPECT_EQ(r.entry.executed_index, 0);
  EXPECT_EQ(r.chosen, Constant(0.5, 40));
}

struct StrandedSetup {
  ScenarioSpec spec;
  WorldModel world;
  JointState joint;
};

StrandedSetup Stranded() {
  StrandedSetup s;
  s.spec = GenerateScenarioBatch(ScenarioFamily::kStrandedTruck, 1, 21).front();
  s.world = MakeWorldModel(s.spec, kDefaultDt);
  s.joint = InitialJointState(s.spec);
  return s;
}

TEST(ChooseCandidate, OracleAvoidsStrandedTruck) {
  const StrandedSetup s = Stranded();
  const PlannerHandle handle;
  const PlanQuery q{s.joint, {}, s.spec.context, s.world.footprints, kDefaultDt,
                    0, 10, &s.world};
  const PlanResult r = Plan(handle, OraclePredictor{}, q, RngStream{4, 0});
  const ReplanEntry& e = r.entry;
  const ActionTraj& chosen = e.candidates[static_cast<std::size_t>(e.executed_index)];
  const auto ego = UnicycleRollout(s.joint.robot, chosen, kDefaultDt);
  const PredictionSet& pred = e.predicted_humans[static_cast<std::size_t>(e.executed_index)];
  for (std::size_t i = 0; i < pred.humans.size(); ++i) {
    const ModePrediction& m = pred.humans[i].MostLikely();
    EXPECT_DOUBLE_EQ(m.probability, 1.0);
    ASSERT_FALSE(m.traj.empty());
    const auto human = UnicycleRollout(s.joint.humans[i], m.traj, kDefaultDt);
    EXPECT_EQ(OverlapSum(ego, human, s.world.footprints.robot,
                         s.world.footprints.humans[i]),
              0.0);
  }
}

TEST(ChooseCandidate, ShiftInvariant) {
  const StrandedSetup s = Stranded();
  PlannerHandle shifted;
  shifted.anticipated_reward_offset = 37.5;
  const PlanQuery q{s.joint, {}, s.spec.context, s.world.footprints, kDefaultDt,
                    0, 10, &s.world};
  const PlanResult a = Plan(PlannerHandle{}, OraclePredictor{}, q, RngStream{4, 0});
  const PlanResult b = Plan(shifted, OraclePredictor{}, q, RngStream{4, 0});
  EXPECT_EQ(a.entry.executed_index, b.entry.executed_index);
  EXPECT_EQ(a.chosen, b.chosen);
  for (std::size_t i = 0; i < a.entry.candidate_rewards_predicted.size(); ++i) {
    EXPECT_NEAR(b.entry.candidate_rewards_predicted[i] -
                    a.entry.candidate_rewards_predicted[i],
                37.5, 1e-9);
  }
}

TEST(ValidateHandle, RejectsOutOfBoundsLevels) {
  PlannerHandle h;
  h.accel_levels = {3.9};
  EXPECT_THROW(ValidateHandle(h), Error);
  h = PlannerHandle{};
  h.n_modes_out = 0;
  EXPECT_THROW(ValidateHandle(h), Error);
}

}  // namespace
}  // namespace regret_miner
