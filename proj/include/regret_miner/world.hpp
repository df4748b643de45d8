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

// Rule-based human agents and the one-step world transition they share with
// the ground-truth predictor.

#ifndef REGRET_MINER_WORLD_HPP_
#define REGRET_MINER_WORLD_HPP_

#include <vector>

#include "regret_miner/core.hpp"
#include "regret_miner/records.hpp"

namespace regret_miner {

// Controller constants of the rule-based humans.
struct HumanControl {
  double speed_gain = 0.8;
  double max_accel = 2.0;
  double comfort_brake = 3.0;
  double hard_brake = 4.0;
  double follow_gap = 8.0;    // center-to-center gap kept behind a leader
  double resume_headway = 2.0;  // seconds of clear lane a stopped car needs
  double lateral_gain = 0.15;
  double heading_gain = 1.5;
  double max_lane_heading = 0.25;
  double crossing_cell_half_width = 3.0;
  double crossing_time_window = 4.0;
  double yield_margin = 0.5;  // clearance a yielding crosser leaves to the lane
  double speed_deadband = 0.05;
  // Step length used when braking exactly to a stop.
  double dt = kDefaultDt;
};

// One control step of a human. `self_index` is this human's slot in
// `joint.humans` (or -1 when it is not part of the joint state); it keeps the
// agent from reacting to itself. The IntersectionCross yield decision uses the
// first uniform draw of `rng`, so a constant stream gives a latched choice.
Action HumanPolicyStep(const HumanProfile& profile, const AgentState& self,
                       int self_index, const JointState& joint,
                       const Context& ctx, const RngStream& rng,
                       const HumanControl& control = {});

// Everything needed to advance the true world by one step.
struct WorldModel {
  Context ctx;
  std::vector<HumanProfile> profiles;
  std::vector<RngStream> human_streams;
  Footprints footprints;
  double dt = kDefaultDt;
  ActionBounds bounds;
  HumanControl control;
};

WorldModel MakeWorldModel(const ScenarioSpec& spec, double dt);

// All humans act on the same joint state, then every agent integrates.
// Human actions are returned through `human_actions` when non-null.
JointState AdvanceWorld(const WorldModel& world, const JointState& joint,
                        const Action& robot_action,
                        std::vector<Action>* human_actions = nullptr);

// Integrates logged actions forward from `initial`.
std::vector<JointState> ReplayActions(const JointState& initial,
                                      const ActionTraj& robot,
                                      const std::vector<ActionTraj>& humans,
                                      double dt);

// Overlap-weighted cost of one frame: sum of overlaps x dt x |w_col|.
double FrameCollisionCost(const JointState& joint, const Footprints& fp,
                          double dt, double collision_weight);

}  // namespace regret_miner

#endif  // REGRET_MINER_WORLD_HPP_
