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

#include <algorithm>
#include <cstdio>

namespace regret_miner {

SceneRecord RunClosedLoop(const ScenarioSpec& spec,
                          const PlannerHandle& planner,
                          const Predictor& predictor, int replan_every,
                          std::uint64_t planner_salt) {
  ValidateHandle(planner);
  if (replan_every < 1 || spec.horizon % replan_every != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "replan_every must be >= 1 and divide the horizon");
  }
  if (planner.horizon < replan_every) {
    throw Error(ErrorCode::kInvalidArgument,
                "planner horizon shorter than the replan interval");
  }
  const double dt = planner.dt;
  const WorldModel world = MakeWorldModel(spec, dt);

  SceneRecord rec;
  rec.scenario_id = spec.scenario_id;
  rec.family = spec.family;
  rec.context = spec.context;
  rec.dt = dt;
  rec.replan_every = replan_every;
  rec.footprints = world.footprints;
  rec.reward_weights = planner.weights;
  rec.states.reserve(static_cast<std::size_t>(spec.horizon) + 1);
  rec.states.push_back(InitialJointState(spec));
  rec.per_frame_collision_cost.push_back(FrameCollisionCost(
      rec.states.back(), rec.footprints, dt, planner.weights.collision));
  rec.human_actions.resize(spec.humans.size());

  const RngStream plan_stream = RngStream{spec.seed ^ planner_salt, 1};
  std::vector<Action> step;
  for (int t = 0; t < spec.horizon; t += replan_every) {
    const std::size_t h0 =
        static_cast<std::size_t>(std::max(0, t - kPlannerHistory));
    const std::span<const JointState> history(rec.states.data() + h0,
                                              static_cast<std::size_t>(t) - h0);
    const JointState now = rec.states.back();
    PlanQuery query{now, history, spec.context, rec.footprints};
    query.dt = dt;
    query.length = std::min(planner.horizon, spec.horizon - t);
    query.execute_steps = replan_every;
    query.world = &world;
    PlanResult result;
    try {
      result = Plan(planner, predictor, query, plan_stream.Derive(t));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kAborted) throw;
      rec.aborted = true;
      rec.diagnostic = "aborted at t=" + std::to_string(t) + ": " + e.what();
      return rec;
    }
    ActionTraj segment = result.chosen.Prefix(replan_every);
    for (const Action& a : segment.actions) {
      rec.states.push_back(AdvanceWorld(world, rec.states.back(), a, &step));
      for (std::size_t i = 0; i < step.size(); ++i) {
        rec.human_actions[i].actions.push_back(step[i]);
      }
      rec.per_frame_collision_cost.push_back(FrameCollisionCost(
          rec.states.back(), rec.footprints, dt, planner.weights.collision));
    }
    rec.executed_robot.push_back(std::move(segment));
    rec.replan_log.push_back(std::move(result.entry));
  }
  return rec;
}

std::vector<JointState> ReplayScene(const SceneRecord& scene) {
  if (scene.states.empty()) {
    throw Error(ErrorCode::kSchema, "scene has no initial state");
  }
  return ReplayActions(scene.states.front(), scene.RobotActions(),
                       scene.human_actions, scene.dt);
}

// ---------------------------------------------------------------------------

std::string_view FamilyName(ScenarioFamily family) {
  switch (family) {
    case ScenarioFamily::kStrandedTruck:
      return "StrandedTruck";
    case ScenarioFamily::kStoppedTraffic:
      return "StoppedTraffic";
    case ScenarioFamily::kIntersection:
      return "Intersection";
    case ScenarioFamily::kSparseCruise:
      return "SparseCruise";
    case ScenarioFamily::kNavWorld:
      return "NavWorld";
  }
  return "SparseCruise";
}

ScenarioFamily ParseFamily(std::string_view name) {
  for (ScenarioFamily f :
       {ScenarioFamily::kStrandedTruck, ScenarioFamily::kStoppedTraffic,
        ScenarioFamily::kIntersection, ScenarioFamily::kSparseCruise,
        ScenarioFamily::kNavWorld}) {
    if (FamilyName(f) == name) return f;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown scenario family '" + std::string(name) + "'");
}

namespace {

constexpr double kLane0 = 0.0;
constexpr double kLane1 = 3.7;

HumanSetup Car(double x, double y, double speed, HumanMode mode,
               double target_speed, double reaction = 20.0) {
  HumanSetup h;
  h.init = {x, y, 0.0, speed};
  h.profile.mode = mode;
  h.profile.target_speed = target_speed;
  h.profile.reaction_radius = reaction;
  h.profile.radius = kCarRadius;
  return h;
}

// An optional car in the other lane that makes lane changes non-trivial.
void MaybeAddAdjacentTraffic(Rng& rng, ScenarioSpec& spec, double chance) {
  if (rng.Uniform() < chance) {
    spec.humans.push_back(Car(rng.Uniform(-5.0, 60.0), kLane1,
                              rng.Uniform(7.0, 10.0), HumanMode::kCruise,
                              rng.Uniform(7.0, 10.0)));
  }
}

// Rough seconds until the robot reaches `x`, assuming it settles halfway
// between its initial speed and the speed limit.
double ArrivalTime(const ScenarioSpec& spec, double x) {
  const LaneFrame lanes = LanesOf(spec.context);
  const double v = 0.5 * (spec.robot_init.speed + lanes.speed_limit);
  return (x - spec.robot_init.x) / std::max(v, 0.1);
}

void StrandedTruck(Rng& rng, bool source, ScenarioSpec& spec) {
  const bool blocking = rng.Uniform() < 0.85;
  const double lane = blocking ? kLane0 : kLane1;
  HumanSetup truck = Car(rng.Uniform(45.0, 75.0), lane, 0.0,
                         HumanMode::kStranded, rng.Uniform(6.0, 9.0));
  truck.profile.radius = kTruckRadius;
  if (source) {
    // In the source domain a vehicle waiting ahead pulls away once the robot
    // gets close.
    truck.profile.mode = HumanMode::kStopped;
    truck.profile.radius = kCarRadius;
    truck.profile.hidden.release_distance = rng.Uniform(22.0, 30.0);
  } else {
    truck.profile.hidden.never_moves = true;
  }
  spec.humans.push_back(truck);
  if (blocking) {
    // A pair of cars level with the robot in the free lane, so swerving
    // around the obstacle means dropping back behind both.
    double x = rng.Uniform(-3.0, 3.0);
    for (int k = 0; k < 2; ++k) {
      spec.humans.push_back(Car(x, kLane1, spec.robot_init.speed,
                                HumanMode::kCruise, rng.Uniform(11.5, 12.0)));
      x -= rng.Uniform(9.0, 12.0);
    }
  }
}

void StoppedTraffic(Rng& rng, bool source, ScenarioSpec& spec) {
  const int queue = source ? 1 : 2 + static_cast<int>(rng.Index(2));
  double x = rng.Uniform(45.0, 70.0);
  for (int q = 0; q < queue; ++q) {
    // Stop-and-go: the queue is already creeping forward. Followers keep
    // their gap to the car ahead.
    spec.humans.push_back(Car(x, kLane0, rng.Uniform(1.0, 2.5),
                              q == 0 ? HumanMode::kStopped : HumanMode::kCruise,
                              rng.Uniform(6.0, 9.0)));
    // Queue grows backwards toward the robot from the head car.
    x -= rng.Uniform(6.5, 8.5);
  }
  std::reverse(spec.humans.begin(), spec.humans.end());
  MaybeAddAdjacentTraffic(rng, spec, 0.3);
}

void Intersection(Rng& rng, bool source, ScenarioSpec& spec) {
  HumanSetup crosser;
  const double x = rng.Uniform(40.0, 65.0);
  const double speed = rng.Uniform(3.0, 5.0);
  // Time the crossing so the crosser reaches the robot's lane about when the
  // robot does.
  const double lead = rng.Uniform(-0.5, 1.0);
  const double entry = kLane0 - DrivingCorridor{}.lane_width / 2.0;
  const double y = std::min(entry - 1.0,
                            entry - speed * (ArrivalTime(spec, x) - lead));
  crosser.init = {x, y, kPi / 2.0, speed};
  crosser.profile.mode = HumanMode::kIntersectionCross;
  crosser.profile.target_speed = speed;
  crosser.profile.reaction_radius = 20.0;
  crosser.profile.radius = kCarRadius;
  crosser.profile.hidden.yield_probability = source ? 1.0 : 0.8;
  spec.humans.push_back(crosser);
  MaybeAddAdjacentTraffic(rng, spec, 0.3);
}

void SparseCruise(Rng& rng, ScenarioSpec& spec) {
  const int n = 1 + static_cast<int>(rng.Index(3));
  for (int k = 0; k < n; ++k) {
    const bool same_lane = rng.Uniform() < 0.5;
    const HumanMode mode =
        rng.Uniform() < 0.5 ? HumanMode::kCruise : HumanMode::kYieldIfClose;
    const double speed = rng.Uniform(8.0, 11.0);
    spec.humans.push_back(Car(same_lane ? rng.Uniform(30.0, 90.0)
                                        : rng.Uniform(-5.0, 90.0),
                              same_lane ? kLane0 : kLane1, speed, mode, speed,
                              rng.Uniform(10.0, 20.0)));
  }
}

void NavScene(Rng& rng, bool source, ScenarioSpec& spec) {
  NavWorld nav;
  nav.human_start = {rng.Uniform(14.0, 24.0), rng.Uniform(-6.0, -4.0)};
  spec.context = nav;
  spec.robot_init = {nav.robot_start.x, nav.robot_start.y, 0.0,
                     rng.Uniform(1.5, 2.5)};
  HumanSetup walker;
  const double speed = rng.Uniform(1.0, 1.4);
  const double entry = -1.0;  // edge of the single nav lane
  const double lead = rng.Uniform(-0.5, 1.5);
  const double y = std::clamp(
      entry - speed * (ArrivalTime(spec, nav.human_start.x) - lead),
      nav.human_start.y, entry - 1.0);
  walker.init = {nav.human_start.x, y, kPi / 2.0, speed};
  walker.profile.mode = HumanMode::kIntersectionCross;
  walker.profile.target_speed = speed;
  walker.profile.reaction_radius = 6.0;
  walker.profile.radius = kPedestrianRadius;
  walker.profile.hidden.yield_probability = source ? 1.0 : 0.8;
  spec.humans.push_back(walker);
  if (rng.Uniform() < 0.4) {
    // Oncoming walker keeping to the side of the path.
    HumanSetup oncoming;
    const double side = rng.Uniform() < 0.5 ? -1.0 : 1.0;
    oncoming.init = {rng.Uniform(20.0, 40.0), side * rng.Uniform(2.4, 3.0),
                     kPi, rng.Uniform(0.8, 1.2)};
    oncoming.profile.mode = HumanMode::kCruise;
    oncoming.profile.target_speed = oncoming.init.speed;
    oncoming.profile.reaction_radius = 3.0;
    oncoming.profile.radius = kPedestrianRadius;
    spec.humans.push_back(oncoming);
  }
}

}  // namespace

std::vector<ScenarioSpec> GenerateScenarioBatch(ScenarioFamily family, int n,
                                                std::uint64_t base_seed,
                                                const FamilyOptions& options) {
  if (n < 1) {
    throw Error(ErrorCode::kInvalidArgument, "batch size must be >= 1");
  }
  if (options.horizon < 1) {
    throw Error(ErrorCode::kInvalidArgument, "horizon must be >= 1");
  }
  const std::string name(FamilyName(family));
  const std::uint64_t family_key = HashString(name);
  std::vector<ScenarioSpec> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    ScenarioSpec spec;
    char id[64];
    std::snprintf(id, sizeof(id), "%s-%s%03d", name.c_str(),
                  options.source_domain ? "src-" : "", i);
    spec.scenario_id = id;
    spec.family = name;
    spec.horizon = options.horizon;
    spec.seed = SplitMix64(base_seed ^ SplitMix64(family_key + static_cast<std::uint64_t>(i) +
                                                  (options.source_domain ? 0x5eedULL : 0ULL)));
    Rng rng(RngStream{spec.seed, 7});
    spec.context = DrivingCorridor{};
    spec.robot_init = {0.0, kLane0, 0.0, rng.Uniform(8.0, 11.0)};
    switch (family) {
      case ScenarioFamily::kStrandedTruck:
        StrandedTruck(rng, options.source_domain, spec);
        break;
      case ScenarioFamily::kStoppedTraffic:
        StoppedTraffic(rng, options.source_domain, spec);
        break;
      case ScenarioFamily::kIntersection:
        Intersection(rng, options.source_domain, spec);
        break;
      case ScenarioFamily::kSparseCruise:
        SparseCruise(rng, spec);
        break;
      case ScenarioFamily::kNavWorld:
        NavScene(rng, options.source_domain, spec);
        break;
    }
    ValidateSpec(spec);
    out.push_back(std::move(spec));
  }
  return out;
}

}  // namespace regret_miner
