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

// Data records exchanged between the simulator, planner, predictor and the
// offline scoring code.

#ifndef REGRET_MINER_RECORDS_HPP_
#define REGRET_MINER_RECORDS_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "regret_miner/core.hpp"

namespace regret_miner {

enum class HumanMode {
  kCruise,
  kStopped,
  kStranded,
  kIntersectionCross,
  kYieldIfClose,
};

std::string_view HumanModeName(HumanMode mode);
HumanMode ParseHumanMode(std::string_view name);

// Traits the robot cannot observe.
struct HiddenTraits {
  bool never_moves = false;
  double yield_probability = 0.8;
  // A Stopped vehicle with a free road ahead holds until the robot closes to
  // within this distance; 0 releases it immediately.
  double release_distance = 0.0;
  friend bool operator==(const HiddenTraits&, const HiddenTraits&) = default;
};

struct HumanProfile {
  HumanMode mode = HumanMode::kCruise;
  double target_speed = 8.0;
  double reaction_radius = 15.0;
  HiddenTraits hidden;
  double radius = kCarRadius;
  friend bool operator==(const HumanProfile&, const HumanProfile&) = default;
};

void ValidateProfile(const HumanProfile& profile);

struct HumanSetup {
  AgentState init;
  HumanProfile profile;
  friend bool operator==(const HumanSetup&, const HumanSetup&) = default;
};

struct ScenarioSpec {
  std::string scenario_id;
  std::string family;
  Context context;
  AgentState robot_init;
  std::vector<HumanSetup> humans;
  int horizon = kDefaultSceneHorizon;
  std::uint64_t seed = 0;
  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

void ValidateSpec(const ScenarioSpec& spec);
JointState InitialJointState(const ScenarioSpec& spec);
Footprints FootprintsOf(const ScenarioSpec& spec);

// ---------------------------------------------------------------------------
// Predictions.

enum class BehaviorMode { kGoStraight, kBrake, kYield, kCross, kStay };
inline constexpr int kNumBehaviorModes = 5;

std::string_view BehaviorModeName(BehaviorMode mode);
BehaviorMode ParseBehaviorMode(std::string_view name);

struct ModePrediction {
  BehaviorMode mode = BehaviorMode::kGoStraight;
  double probability = 0.0;
  // Empty when the rollout was not retained in a log.
  ActionTraj traj;
  friend bool operator==(const ModePrediction&, const ModePrediction&) =
      default;
};

struct HumanPrediction {
  std::vector<ModePrediction> modes;
  const ModePrediction& MostLikely() const;
  friend bool operator==(const HumanPrediction&, const HumanPrediction&) =
      default;
};

struct PredictionSet {
  std::vector<HumanPrediction> humans;
  friend bool operator==(const PredictionSet&, const PredictionSet&) = default;
};

// ---------------------------------------------------------------------------
// Deployment logs.

struct RewardWeights {
  double progress = 1.0;
  double lane = -0.5;
  double collision = -100.0;
  double control = -0.1;
  friend bool operator==(const RewardWeights&, const RewardWeights&) = default;
};

void ValidateWeights(const RewardWeights& weights);

struct ReplanEntry {
  int t = 0;
  std::vector<ActionTraj> candidates;
  // Per candidate. Mode labels and probabilities are kept for every
  // candidate; rollouts only for the executed one.
  std::vector<PredictionSet> predicted_humans;
  std::vector<double> candidate_rewards_predicted;
  int executed_index = 0;
  // Reward of the executed segment of the chosen plan under each predicted
  // joint mode, with the matching probability weights.
  std::vector<double> predicted_reward_samples;
  std::vector<double> predicted_reward_weights;
  friend bool operator==(const ReplanEntry&, const ReplanEntry&) = default;
};

struct SceneRecord {
  std::string scenario_id;
  std::string family;
  Context context;
  double dt = kDefaultDt;
  int replan_every = 10;
  Footprints footprints;
  RewardWeights reward_weights;
  // horizon + 1 joint states, states[k].t == k.
  std::vector<JointState> states;
  // Executed robot segments, one per replan.
  std::vector<ActionTraj> executed_robot;
  // Realized per-human actions over the whole scene (start_t = 0).
  std::vector<ActionTraj> human_actions;
  std::vector<ReplanEntry> replan_log;
  // One entry per state; frame 0 is the initial state.
  std::vector<double> per_frame_collision_cost;
  bool aborted = false;
  std::string diagnostic;

  int horizon() const { return static_cast<int>(states.size()) - 1; }
  int num_humans() const { return static_cast<int>(human_actions.size()); }
  // Executed robot actions concatenated in time order.
  ActionTraj RobotActions() const;
  // Realized actions of human `index` over [t, t + len), clipped at the end of
  // the scene.
  ActionTraj HumanSegment(int index, int t, int len) const;
  double TotalCollisionCost() const;
  int CollisionFrames() const;
};

// Throws kSchema when a record breaks the log invariants.
void ValidateSceneRecord(const SceneRecord& scene);

}  // namespace regret_miner

#endif  // REGRET_MINER_RECORDS_HPP_
