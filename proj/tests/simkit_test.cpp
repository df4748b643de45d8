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

#include "regret_miner/simkit.hpp"

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "regret_miner/planner.hpp"
#include "regret_miner/predictor.hpp"
#include "regret_miner/world.hpp"

namespace regret_miner {
namespace {

HumanProfile Profile(HumanMode mode, double target_speed) {
  HumanProfile p;
  p.mode = mode;
  p.target_speed = target_speed;
  return p;
}

TEST(HumanPolicy, StrandedNeverActs) {
  JointState joint;
  joint.robot = {3.0, 0.0, 0.0, 10.0};
  joint.humans = {{20.0, 0.0, 0.0, 0.0}};
  const Action a = HumanPolicyStep(Profile(HumanMode::kStranded, 0.0),
                                   joint.humans[0], 0, joint, DrivingCorridor{},
                                   RngStream{1, 2});
  EXPECT_EQ(a, (Action{0.0, 0.0}));
}

TEST(HumanPolicy, CruiseHoldsSetpoint) {
  JointState joint;
  joint.robot = {-200.0, 3.7, 0.0, 0.0};
  joint.humans = {{50.0, 0.0, 0.0, 8.0}};
  const Action a = HumanPolicyStep(Profile(HumanMode::kCruise, 8.0),
                                   joint.humans[0], 0, joint, DrivingCorridor{},
                                   RngStream{1, 2});
  EXPECT_NEAR(a.accel, 0.0, 1e-12);
  EXPECT_NEAR(a.turn_rate, 0.0, 1e-12);
}

TEST(HumanPolicy, CrosserYieldFrequency) {
  HumanProfile p = Profile(HumanMode::kIntersectionCross, 2.0);
  p.radius = kPedestrianRadius;
  JointState joint;
  joint.robot = {0.0, 0.0, 0.0, 10.0};
  joint.humans = {{30.0, -6.0, kPi / 2.0, 2.0}};
  int yields = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const Action a = HumanPolicyStep(p, joint.humans[0], 0, joint,
                                     DrivingCorridor{}, RngStream{5, static_cast<std::uint64_t>(i)});
    yields += a.accel < 0.0;
  }
  EXPECT_NEAR(yields / static_cast<double>(n), 0.8, 0.02);
}

ScenarioSpec EmptyRoad(int horizon) {
  ScenarioSpec spec;
  spec.scenario_id = "empty-000";
  spec.family = "SparseCruise";
  spec.context = DrivingCorridor{};
  spec.robot_init = {0.0, 0.0, 0.0, 5.0};
  spec.horizon = horizon;
  spec.seed = 11;
  return spec;
}

TEST(RunClosedLoop, ReplanCount) {
  const SceneRecord scene =
      RunClosedLoop(EmptyRoad(10), PlannerHandle{}, OraclePredictor{}, 5);
  ASSERT_EQ(scene.replan_log.size(), 2u);
  EXPECT_EQ(scene.replan_log[0].t, 0);
  EXPECT_EQ(scene.replan_log[1].t, 5);
  EXPECT_EQ(scene.horizon(), 10);
  EXPECT_FALSE(scene.aborted);
}

TEST(RunClosedLoop, EmptyRoadMakesProgress) {
  const SceneRecord scene =
      RunClosedLoop(EmptyRoad(60), PlannerHandle{}, OraclePredictor{}, 10);
  EXPECT_GT(scene.states.back().robot.x, scene.states.front().robot.x);
  EXPECT_EQ(scene.CollisionFrames(), 0);
}

TEST(RunClosedLoop, OracleAvoidsStrandedTruck) {
  for (const ScenarioSpec& spec :
       GenerateScenarioBatch(ScenarioFamily::kStrandedTruck, 5, 3)) {
    const SceneRecord scene =
        RunClosedLoop(spec, PlannerHandle{}, OraclePredictor{}, 10);
    EXPECT_EQ(scene.CollisionFrames(), 0) << spec.scenario_id;
  }
}

TEST(RunClosedLoop, ReplayReproducesStates) {
  const auto specs = GenerateScenarioBatch(ScenarioFamily::kIntersection, 2, 8);
  for (const ScenarioSpec& spec : specs) {
    const SceneRecord scene =
        RunClosedLoop(spec, PlannerHandle{}, OraclePredictor{}, 10);
    const auto replay = ReplayScene(scene);
    ASSERT_EQ(replay.size(), scene.states.size());
    for (std::size_t k = 0; k < replay.size(); ++k) {
      EXPECT_NEAR(replay[k].robot.x, scene.states[k].robot.x, 1e-9);
      EXPECT_NEAR(replay[k].robot.y, scene.states[k].robot.y, 1e-9);
      for (std::size_t i = 0; i < replay[k].humans.size(); ++i) {
        EXPECT_NEAR(replay[k].humans[i].x, scene.states[k].humans[i].x, 1e-9);
        EXPECT_NEAR(replay[k].humans[i].y, scene.states[k].humans[i].y, 1e-9);
      }
    }
  }
}

TEST(RunClosedLoop, Deterministic) {
  const ScenarioSpec spec =
      GenerateScenarioBatch(ScenarioFamily::kStoppedTraffic, 1, 4).front();
  const SceneRecord a = RunClosedLoop(spec, PlannerHandle{}, OraclePredictor{}, 10);
  const SceneRecord b = RunClosedLoop(spec, PlannerHandle{}, OraclePredictor{}, 10);
  EXPECT_EQ(a.states, b.states);
  EXPECT_EQ(a.replan_log, b.replan_log);
}

TEST(RunClosedLoop, RejectsBadReplanInterval) {
  EXPECT_THROW(RunClosedLoop(EmptyRoad(10), PlannerHandle{}, OraclePredictor{}, 0),
               Error);
}

TEST(ScenarioBatch, DistinctIds) {
  std::set<std::string> ids;
  const ScenarioFamily families[] = {
      ScenarioFamily::kStrandedTruck, ScenarioFamily::kStoppedTraffic,
      ScenarioFamily::kIntersection, ScenarioFamily::kSparseCruise,
      ScenarioFamily::kNavWorld};
  const int counts[] = {20, 20, 20, 20, 16};
  for (int f = 0; f < 5; ++f) {
    for (const ScenarioSpec& s : GenerateScenarioBatch(families[f], counts[f], 1)) {
      ids.insert(s.scenario_id);
    }
  }
  EXPECT_EQ(ids.size(), 96u);
}

TEST(ScenarioBatch, Deterministic) {
  EXPECT_EQ(GenerateScenarioBatch(ScenarioFamily::kIntersection, 6, 17),
            GenerateScenarioBatch(ScenarioFamily::kIntersection, 6, 17));
  EXPECT_NE(GenerateScenarioBatch(ScenarioFamily::kIntersection, 6, 17),
            GenerateScenarioBatch(ScenarioFamily::kIntersection, 6, 18));
}

TEST(ScenarioBatch, StrandedTruckHasOneStrandedAgent) {
  for (const ScenarioSpec& s :
       GenerateScenarioBatch(ScenarioFamily::kStrandedTruck, 20, 1)) {
    int stranded = 0;
    for (const HumanSetup& h : s.humans) stranded += h.profile.mode == HumanMode::kStranded;
    EXPECT_EQ(stranded, 1) << s.scenario_id;
  }
}

TEST(ScenarioBatch, SourceDomainHasNoStrandedAgents) {
  for (const ScenarioSpec& s :
       GenerateScenarioBatch(ScenarioFamily::kStrandedTruck, 10, 1, {200, true})) {
    for (const HumanSetup& h : s.humans) EXPECT_NE(h.profile.mode, HumanMode::kStranded);
  }
}

TEST(ScenarioFamily, NamesRoundTrip) {
  for (ScenarioFamily f :
       {ScenarioFamily::kStrandedTruck, ScenarioFamily::kStoppedTraffic,
        ScenarioFamily::kIntersection, ScenarioFamily::kSparseCruise,
        ScenarioFamily::kNavWorld}) {
    EXPECT_EQ(ParseFamily(FamilyName(f)), f);
  }
  EXPECT_THROW(ParseFamily("Highway"), Error);
}

}  // namespace
}  // namespace regret_miner
