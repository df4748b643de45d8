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

#include "regret_miner/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace regret_miner {
namespace {

struct Lead {
  bool found = false;
  double gap = std::numeric_limits<double>::infinity();
  double speed = 0.0;
};

// Nearest agent ahead of `self` inside its lane band, measured along the
// agent's own heading.
Lead FindLead(const AgentState& self, int self_index, const JointState& joint,
              double band_half_width) {
  Lead lead;
  const double c = std::cos(self.heading);
  const double s = std::sin(self.heading);
  auto consider = [&](const AgentState& other) {
    const double dx = other.x - self.x;
    const double dy = other.y - self.y;
    const double along = dx * c + dy * s;
    const double across = -dx * s + dy * c;
    if (along <= 0.0 || std::abs(across) >= band_half_width) return;
    if (along < lead.gap) {
      lead.found = true;
      lead.gap = along;
      lead.speed = other.speed;
    }
  };
  consider(joint.robot);
  for (int i = 0; i < static_cast<int>(joint.humans.size()); ++i) {
    if (i != self_index) consider(joint.humans[static_cast<std::size_t>(i)]);
  }
  return lead;
}

double LaneKeepingTurn(const AgentState& self, const Context& ctx,
                       const HumanControl& k) {
  if (!std::holds_alternative<DrivingCorridor>(ctx)) return 0.0;
  if (std::cos(self.heading) < 0.5) return 0.0;
  const LaneFrame lanes = LanesOf(ctx);
  const double offset = NearestLaneCenter(lanes, self.y) - self.y;
  if (std::abs(offset) < k.speed_deadband && std::abs(self.heading) < 0.01) {
    return 0.0;
  }
  const double desired = std::clamp(k.lateral_gain * offset,
                                    -k.max_lane_heading, k.max_lane_heading);
  return std::clamp(k.heading_gain * WrapAngle(desired - self.heading), -1.0,
                    1.0);
}

double BrakeToStop(double speed, double limit, double dt) {
  return -std::min(limit, speed / dt);
}

double SpeedControl(double target, double speed, const HumanControl& k) {
  const double err = target - speed;
  if (std::abs(err) < k.speed_deadband) return 0.0;
  return std::clamp(k.speed_gain * err, -k.hard_brake, k.max_accel);
}

double LaneBand(const Context& ctx) { return LanesOf(ctx).width / 2.0; }

Action Cruise(const HumanProfile& p, const AgentState& self, int self_index,
              const JointState& joint, const Context& ctx,
              const HumanControl& k) {
  double accel = SpeedControl(p.target_speed, self.speed, k);
  const Lead lead = FindLead(self, self_index, joint, LaneBand(ctx));
  if (lead.found && lead.gap < p.reaction_radius) {
    const double desired =
        std::max(0.0, lead.speed + 0.5 * (lead.gap - k.follow_gap));
    if (desired < p.target_speed) {
      accel = std::clamp(desired - self.speed, -k.hard_brake, k.max_accel);
    }
  }
  return {accel, LaneKeepingTurn(self, ctx, k)};
}

Action Stopped(const HumanProfile& p, const AgentState& self, int self_index,
               const JointState& joint, const Context& ctx,
               const HumanControl& k, double dt) {
  const Lead lead = FindLead(self, self_index, joint, LaneBand(ctx));
  const double clear = p.target_speed * k.resume_headway + k.follow_gap;
  if (lead.found && lead.gap < clear) {
    return {BrakeToStop(self.speed, k.comfort_brake, dt), 0.0};
  }
  // Once rolling it keeps going, so the hold only applies from rest.
  const double release = p.hidden.release_distance;
  if (release > 0.0 && self.speed < k.speed_deadband &&
      Distance(joint.robot, self) > release) {
    return {BrakeToStop(self.speed, k.comfort_brake, dt), 0.0};
  }
  return Cruise(p, self, self_index, joint, ctx, k);
}

Action IntersectionCross(const HumanProfile& p, const AgentState& self,
                         const JointState& joint, const Context& ctx,
                         const RngStream& rng, const HumanControl& k,
                         double dt) {
  const double dir = std::sin(self.heading) >= 0.0 ? 1.0 : -1.0;
  const double turn = std::clamp(
      k.heading_gain * WrapAngle(dir * kPi / 2.0 - self.heading), -1.0, 1.0);
  const LaneFrame lanes = LanesOf(ctx);
  const double robot_lane = NearestLaneCenter(lanes, joint.robot.y);
  // Yielding means stopping with the whole body short of the lane edge.
  const double entry =
      robot_lane - dir * (lanes.width / 2.0 + p.radius + k.yield_margin);
  const bool before_lane = dir * (self.y - entry) < 0.0;

  const AgentState& robot = joint.robot;
  const double dx = self.x - robot.x;
  bool robot_coming = false;
  if (dx > -k.crossing_cell_half_width) {
    const double to_cell = std::max(0.0, dx - k.crossing_cell_half_width);
    robot_coming = to_cell / std::max(robot.speed, 0.1) < k.crossing_time_window;
  }
  if (before_lane && robot_coming) {
    Rng draw(rng);
    if (draw.Uniform() < p.hidden.yield_probability) {
      return {BrakeToStop(self.speed, k.comfort_brake, dt), turn};
    }
  }
  return {SpeedControl(p.target_speed, self.speed, k), turn};
}

Action YieldIfClose(const HumanProfile& p, const AgentState& self,
                    int self_index, const JointState& joint,
                    const Context& ctx, const HumanControl& k, double dt) {
  const AgentState& robot = joint.robot;
  const double along = (robot.x - self.x) * std::cos(self.heading) +
                       (robot.y - self.y) * std::sin(self.heading);
  if (Distance(robot, self) < p.reaction_radius && along > -2.0) {
    return {BrakeToStop(self.speed, k.hard_brake, dt),
            LaneKeepingTurn(self, ctx, k)};
  }
  return Cruise(p, self, self_index, joint, ctx, k);
}

Action Clip(const Action& a, const ActionBounds& b) {
  return {std::clamp(a.accel, -b.max_accel, b.max_accel),
          std::clamp(a.turn_rate, -b.max_turn_rate, b.max_turn_rate)};
}

}  // namespace

Action HumanPolicyStep(const HumanProfile& profile, const AgentState& self,
                       int self_index, const JointState& joint,
                       const Context& ctx, const RngStream& rng,
                       const HumanControl& control) {
  const double dt = control.dt;
  switch (profile.mode) {
    case HumanMode::kStranded:
      return {0.0, 0.0};
    case HumanMode::kCruise:
      return Cruise(profile, self, self_index, joint, ctx, control);
    case HumanMode::kStopped:
      return Stopped(profile, self, self_index, joint, ctx, control, dt);
    case HumanMode::kIntersectionCross:
      return IntersectionCross(profile, self, joint, ctx, rng, control, dt);
    case HumanMode::kYieldIfClose:
      return YieldIfClose(profile, self, self_index, joint, ctx, control, dt);
  }
  return {0.0, 0.0};
}

WorldModel MakeWorldModel(const ScenarioSpec& spec, double dt) {
  ValidateSpec(spec);
  WorldModel world;
  world.ctx = spec.context;
  world.dt = dt;
  world.control.dt = dt;
  world.footprints = FootprintsOf(spec);
  const RngStream base{spec.seed, 0};
  for (std::size_t i = 0; i < spec.humans.size(); ++i) {
    world.profiles.push_back(spec.humans[i].profile);
    world.human_streams.push_back(base.Derive(1000 + i));
  }
  return world;
}

JointState AdvanceWorld(const WorldModel& world, const JointState& joint,
                        const Action& robot_action,
                        std::vector<Action>* human_actions) {
  const std::size_t m = joint.humans.size();
  if (world.profiles.size() != m) {
    throw Error(ErrorCode::kInvalidArgument,
                "world model and joint state disagree on human count");
  }
  std::vector<Action> acts(m);
  for (std::size_t i = 0; i < m; ++i) {
    acts[i] = Clip(HumanPolicyStep(world.profiles[i], joint.humans[i],
                                   static_cast<int>(i), joint, world.ctx,
                                   world.human_streams[i], world.control),
                   world.bounds);
  }
  JointState next;
  next.t = joint.t + 1;
  next.robot = UnicycleStep(joint.robot, robot_action, world.dt);
  next.humans.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    next.humans.push_back(UnicycleStep(joint.humans[i], acts[i], world.dt));
  }
  if (human_actions != nullptr) *human_actions = std::move(acts);
  return next;
}

std::vector<JointState> ReplayActions(const JointState& initial,
                                      const ActionTraj& robot,
                                      const std::vector<ActionTraj>& humans,
                                      double dt) {
  if (humans.size() != initial.humans.size()) {
    throw Error(ErrorCode::kInvalidArgument, "replay human count mismatch");
  }
  for (const ActionTraj& h : humans) {
    if (h.size() != robot.size()) {
      throw Error(ErrorCode::kInvalidArgument, "replay length mismatch");
    }
  }
  std::vector<JointState> out{initial};
  out.reserve(static_cast<std::size_t>(robot.size()) + 1);
  for (int k = 0; k < robot.size(); ++k) {
    const JointState& cur = out.back();
    JointState next;
    next.t = cur.t + 1;
    next.robot = UnicycleStep(cur.robot, robot.actions[k], dt);
    for (std::size_t i = 0; i < humans.size(); ++i) {
      next.humans.push_back(
          UnicycleStep(cur.humans[i], humans[i].actions[k], dt));
    }
    out.push_back(std::move(next));
  }
  return out;
}

double FrameCollisionCost(const JointState& joint, const Footprints& fp,
                          double dt, double collision_weight) {
  double overlap = 0.0;
  for (std::size_t i = 0; i < joint.humans.size(); ++i) {
    overlap += FootprintOverlap(joint.robot, joint.humans[i], fp.robot,
                                fp.humans.at(i));
  }
  return overlap * dt * std::abs(collision_weight);
}

}  // namespace regret_miner
