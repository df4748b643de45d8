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

// Sampling-based receding-horizon planner scoring a small candidate library
// against ego-conditioned predictions.

#ifndef REGRET_MINER_PLANNER_HPP_
#define REGRET_MINER_PLANNER_HPP_

#include <span>
#include <vector>

#include "regret_miner/core.hpp"
#include "regret_miner/predictor.hpp"
#include "regret_miner/records.hpp"
#include "regret_miner/world.hpp"

namespace regret_miner {

enum class SteerProfile { kStraight, kLaneChangeLeft, kLaneChangeRight };

struct PlannerHandle {
  RewardWeights weights;
  std::vector<double> accel_levels = {-3.0, -1.0, 0.0, 1.0};
  std::vector<SteerProfile> steer_profiles = {SteerProfile::kStraight,
                                              SteerProfile::kLaneChangeLeft,
                                              SteerProfile::kLaneChangeRight};
  // Adds a coasting second stage (zero accel over the second half) for every
  // single-stage candidate.
  bool two_stage = false;
  bool include_maintain = true;
  int horizon = 40;
  double dt = kDefaultDt;
  double accel_jitter = 0.2;
  // Lateral controller used to synthesize steering profiles.
  double max_heading = 0.3;
  double lateral_gain = 0.3;
  double heading_gain = 2.0;
  double max_turn = 0.5;
  double steer_jitter = 0.1;
  int n_modes_out = 1;
  // Added to every anticipated reward; used to model overconfident planning.
  double anticipated_reward_offset = 0.0;
  ActionBounds bounds;

  int n_candidates() const;
  friend bool operator==(const PlannerHandle&, const PlannerHandle&) = default;
};

void ValidateHandle(const PlannerHandle& handle);

// Candidate set; the maintain trajectory (all zeros) comes first when enabled.
std::vector<ActionTraj> SampleCandidates(const PlannerHandle& handle,
                                         const AgentState& state,
                                         const Context& ctx,
                                         const RngStream& rng, int length,
                                         int start_t = 0);

struct RewardTerms {
  double progress = 0.0;
  double lane = 0.0;
  double collision = 0.0;  // summed overlap depth
  double control = 0.0;

  double Total(const RewardWeights& w) const {
    return w.progress * progress + w.lane * lane + w.collision * collision +
           w.control * control;
  }
};

// Terms of the ego trajectory alone (collision left at zero), evaluated over
// the first `steps` actions (all when negative).
RewardTerms EgoTerms(const std::vector<AgentState>& ego_rollout,
                     const AgentState& start, const ActionTraj& ego,
                     const Context& ctx, int steps = -1);

// Summed overlap between a robot rollout and one human's rollout over the
// first `steps` states (all when negative).
double OverlapSum(const std::vector<AgentState>& ego_rollout,
                  const std::vector<AgentState>& human_rollout,
                  double robot_radius, double human_radius, int steps = -1);

RewardTerms ComputeRewardTerms(const ActionTraj& ego,
                               std::span<const ActionTraj> humans,
                               const JointState& joint, const Context& ctx,
                               const Footprints& footprints, double dt);

double Reward(const RewardWeights& weights, const ActionTraj& ego,
              std::span<const ActionTraj> humans, const JointState& joint,
              const Context& ctx, const Footprints& footprints, double dt);

// Index of the largest value; ties go to the lowest index.
int ArgmaxLowestIndex(std::span<const double> values);

struct PlanQuery {
  const JointState& joint;
  std::span<const JointState> history;
  const Context& ctx;
  const Footprints& footprints;
  double dt = kDefaultDt;
  // Candidate length; defaults to the handle horizon when <= 0.
  int length = 0;
  // Steps that will actually be executed before the next replan.
  int execute_steps = 10;
  const WorldModel* world = nullptr;
};

struct PlanResult {
  ActionTraj chosen;
  ReplanEntry entry;
};

// Scores the given candidates and picks the argmax of expected reward.
PlanResult ChooseCandidate(const PlannerHandle& handle,
                           const Predictor& predictor,
                           std::vector<ActionTraj> candidates,
                           const PlanQuery& query);

PlanResult Plan(const PlannerHandle& handle, const Predictor& predictor,
                const PlanQuery& query, const RngStream& rng);

}  // namespace regret_miner

#endif  // REGRET_MINER_PLANNER_HPP_
