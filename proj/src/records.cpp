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

#include "regret_miner/records.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace regret_miner {

std::string_view HumanModeName(HumanMode mode) {
  switch (mode) {
    case HumanMode::kCruise:
      return "Cruise";
    case HumanMode::kStopped:
      return "Stopped";
    case HumanMode::kStranded:
      return "Stranded";
    case HumanMode::kIntersectionCross:
      return "IntersectionCross";
    case HumanMode::kYieldIfClose:
      return "YieldIfClose";
  }
  return "Cruise";
}

HumanMode ParseHumanMode(std::string_view name) {
  for (HumanMode m :
       {HumanMode::kCruise, HumanMode::kStopped, HumanMode::kStranded,
        HumanMode::kIntersectionCross, HumanMode::kYieldIfClose}) {
    if (HumanModeName(m) == name) return m;
  }
  throw Error(ErrorCode::kSchema,
              "unknown human mode '" + std::string(name) + "'");
}

void ValidateProfile(const HumanProfile& profile) {
  if (profile.mode == HumanMode::kStranded && !profile.hidden.never_moves) {
    throw Error(ErrorCode::kInvalidArgument,
                "a stranded agent must have never_moves set");
  }
  if (!(profile.radius > 0.0) || !(profile.target_speed >= 0.0) ||
      !(profile.reaction_radius >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid human profile values");
  }
  if (!(profile.hidden.release_distance >= 0.0) ||
      !std::isfinite(profile.hidden.release_distance)) {
    throw Error(ErrorCode::kInvalidArgument, "release distance must be >= 0");
  }
  if (!(profile.hidden.yield_probability >= 0.0 &&
        profile.hidden.yield_probability <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "yield probability must lie in [0, 1]");
  }
}

void ValidateSpec(const ScenarioSpec& spec) {
  if (spec.horizon < 1) {
    throw Error(ErrorCode::kInvalidArgument, "scenario horizon must be >= 1");
  }
  ValidateContext(spec.context);
  for (const HumanSetup& h : spec.humans) ValidateProfile(h.profile);
}

JointState InitialJointState(const ScenarioSpec& spec) {
  JointState joint;
  joint.robot = spec.robot_init;
  joint.robot.heading = WrapAngle(joint.robot.heading);
  for (const HumanSetup& h : spec.humans) {
    AgentState s = h.init;
    s.heading = WrapAngle(s.heading);
    joint.humans.push_back(s);
  }
  joint.t = 0;
  return joint;
}

Footprints FootprintsOf(const ScenarioSpec& spec) {
  Footprints fp;
  fp.robot = kRobotRadius;
  for (const HumanSetup& h : spec.humans) fp.humans.push_back(h.profile.radius);
  return fp;
}

std::string_view BehaviorModeName(BehaviorMode mode) {
  switch (mode) {
    case BehaviorMode::kGoStraight:
      return "GoStraight";
    case BehaviorMode::kBrake:
      return "Brake";
    case BehaviorMode::kYield:
      return "Yield";
    case BehaviorMode::kCross:
      return "Cross";
    case BehaviorMode::kStay:
      return "Stay";
  }
  return "GoStraight";
}

BehaviorMode ParseBehaviorMode(std::string_view name) {
  for (int i = 0; i < kNumBehaviorModes; ++i) {
    const auto m = static_cast<BehaviorMode>(i);
    if (BehaviorModeName(m) == name) return m;
  }
  throw Error(ErrorCode::kSchema,
              "unknown behavior mode '" + std::string(name) + "'");
}

const ModePrediction& HumanPrediction::MostLikely() const {
  if (modes.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "prediction without modes");
  }
  // Modes are stored in decreasing probability; ties keep the first.
  const ModePrediction* best = &modes.front();
  for (const ModePrediction& m : modes) {
    if (m.probability > best->probability) best = &m;
  }
  return *best;
}

void ValidateWeights(const RewardWeights& w) {
  if (!std::isfinite(w.progress) || !std::isfinite(w.lane) ||
      !std::isfinite(w.collision) || !std::isfinite(w.control)) {
    throw Error(ErrorCode::kInvalidArgument, "reward weights must be finite");
  }
  if (!(w.collision < 0.0) || !(w.progress > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "reward weights need collision < 0 and progress > 0");
  }
}

ActionTraj SceneRecord::RobotActions() const {
  ActionTraj out;
  for (const ActionTraj& seg : executed_robot) {
    out.actions.insert(out.actions.end(), seg.actions.begin(),
                       seg.actions.end());
  }
  return out;
}

ActionTraj SceneRecord::HumanSegment(int index, int t, int len) const {
  const ActionTraj& all = human_actions.at(static_cast<std::size_t>(index));
  ActionTraj out;
  out.start_t = t;
  const int begin = std::clamp(t, 0, all.size());
  const int end = std::clamp(t + len, begin, all.size());
  out.actions.assign(all.actions.begin() + begin, all.actions.begin() + end);
  return out;
}

double SceneRecord::TotalCollisionCost() const {
  double total = 0.0;
  for (double c : per_frame_collision_cost) total += c;
  return total;
}

int SceneRecord::CollisionFrames() const {
  return static_cast<int>(std::count_if(per_frame_collision_cost.begin(),
                                        per_frame_collision_cost.end(),
                                        [](double c) { return c > 0.0; }));
}

void ValidateSceneRecord(const SceneRecord& scene) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::kSchema,
                "scene '" + scene.scenario_id + "': " + why);
  };
  if (scene.states.empty()) fail("no states");
  const std::size_t m = scene.states.front().humans.size();
  for (std::size_t k = 0; k < scene.states.size(); ++k) {
    if (scene.states[k].humans.size() != m) fail("human count changes");
    if (scene.states[k].t != static_cast<int>(k)) fail("timesteps not monotone");
  }
  if (scene.footprints.humans.size() != m) fail("footprint count mismatch");
  if (scene.per_frame_collision_cost.size() != scene.states.size()) {
    fail("collision cost length mismatch");
  }
  if (scene.aborted) return;
  if (scene.human_actions.size() != m) fail("human action count mismatch");
  int previous_t = -1;
  for (const ReplanEntry& e : scene.replan_log) {
    if (e.t <= previous_t) fail("replan entries not strictly increasing");
    previous_t = e.t;
    if (e.candidates.empty()) fail("empty candidate set");
    if (e.executed_index < 0 ||
        e.executed_index >= static_cast<int>(e.candidates.size())) {
      fail("executed index out of range");
    }
    if (e.predicted_humans.size() != e.candidates.size() ||
        e.candidate_rewards_predicted.size() != e.candidates.size()) {
      fail("replan lists not parallel");
    }
    if (e.predicted_reward_samples.size() !=
        e.predicted_reward_weights.size()) {
      fail("reward samples and weights differ in length");
    }
  }
  if (scene.executed_robot.size() != scene.replan_log.size()) {
    fail("one executed segment per replan expected");
  }
  for (std::size_t i = 0; i < scene.replan_log.size(); ++i) {
    const ReplanEntry& e = scene.replan_log[i];
    const ActionTraj& seg = scene.executed_robot[i];
    const ActionTraj& chosen =
        e.candidates[static_cast<std::size_t>(e.executed_index)];
    if (seg.start_t != e.t || seg.size() > chosen.size() ||
        !std::equal(seg.actions.begin(), seg.actions.end(),
                    chosen.actions.begin())) {
      fail("executed segment is not a prefix of its chosen candidate");
    }
  }
}

}  // namespace regret_miner
