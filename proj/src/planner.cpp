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

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "regret_miner/distribution.hpp"

namespace regret_miner {

int PlannerHandle::n_candidates() const {
  const int library = static_cast<int>(accel_levels.size() *
                                       steer_profiles.size()) *
                      (two_stage ? 2 : 1);
  return library + (include_maintain ? 1 : 0);
}

void ValidateHandle(const PlannerHandle& handle) {
  ValidateWeights(handle.weights);
  if (handle.horizon < 1 || handle.n_modes_out < 1 || !(handle.dt > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "planner horizon, n_modes_out and dt must be positive");
  }
  for (double a : handle.accel_levels) {
    if (std::abs(a) + handle.accel_jitter > handle.bounds.max_accel) {
      throw Error(ErrorCode::kInvalidArgument,
                  "accel level plus jitter exceeds the action bounds");
    }
  }
  if (handle.max_turn > handle.bounds.max_turn_rate) {
    throw Error(ErrorCode::kInvalidArgument,
                "steering limit exceeds the action bounds");
  }
}

namespace {

double TargetLateral(SteerProfile profile, const LaneFrame& lanes, double y) {
  const int idx = NearestLaneIndex(lanes, y);
  const double here = lanes.centers[idx];
  const int n = static_cast<int>(lanes.centers.size());
  switch (profile) {
    case SteerProfile::kStraight:
      return here;
    case SteerProfile::kLaneChangeLeft: {
      // Lanes are not assumed sorted: pick the nearest center above. With no
      // lane there the profile keeps the current one.
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i) {
        if (lanes.centers[i] > here + 1e-9 && lanes.centers[i] < best) {
          best = lanes.centers[i];
        }
      }
      return std::isfinite(best) ? best : here;
    }
    case SteerProfile::kLaneChangeRight: {
      double best = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i) {
        if (lanes.centers[i] < here - 1e-9 && lanes.centers[i] > best) {
          best = lanes.centers[i];
        }
      }
      return std::isfinite(best) ? best : here;
    }
  }
  return here;
}

ActionTraj Synthesize(const PlannerHandle& h, const AgentState& start,
                      const LaneFrame& lanes, double accel, bool coast,
                      SteerProfile profile, double steer_scale, int length,
                      int start_t, double dt) {
  ActionTraj traj;
  traj.start_t = start_t;
  traj.actions.reserve(static_cast<std::size_t>(length));
  const double target_y = TargetLateral(profile, lanes, start.y);
  const double max_heading = h.max_heading * steer_scale;
  AgentState s = start;
  for (int k = 0; k < length; ++k) {
    const double a_nominal = (coast && 2 * k >= length) ? 0.0 : accel;
    // Keep speed inside [0, speed_limit].
    const double lo = -s.speed / dt;
    const double hi = (lanes.speed_limit - s.speed) / dt;
    const double a = std::clamp(a_nominal, std::min(lo, 0.0), std::max(hi, 0.0));
    const double desired = std::clamp(h.lateral_gain * (target_y - s.y),
                                      -max_heading, max_heading);
    const double turn = std::clamp(h.heading_gain * WrapAngle(desired - s.heading),
                                   -h.max_turn, h.max_turn);
    const Action act{a, turn};
    traj.actions.push_back(act);
    s = UnicycleStep(s, act, dt);
  }
  return traj;
}

}  // namespace

std::vector<ActionTraj> SampleCandidates(const PlannerHandle& handle,
                                         const AgentState& state,
                                         const Context& ctx,
                                         const RngStream& rng, int length,
                                         int start_t) {
  if (length < 1) {
    throw Error(ErrorCode::kInvalidArgument, "candidate length must be >= 1");
  }
  const double dt = handle.dt;
  const LaneFrame lanes = LanesOf(ctx);
  Rng draw(rng);
  std::vector<ActionTraj> out;
  out.reserve(static_cast<std::size_t>(handle.n_candidates()));
  if (handle.include_maintain) {
    out.push_back({std::vector<Action>(static_cast<std::size_t>(length)),
                   start_t});
  }
  for (int stage = 0; stage < (handle.two_stage ? 2 : 1); ++stage) {
    for (double level : handle.accel_levels) {
      for (SteerProfile profile : handle.steer_profiles) {
        // Draws happen in a fixed order so the set depends only on the stream.
        const double accel =
            level + draw.Uniform(-handle.accel_jitter, handle.accel_jitter);
        const double steer =
            1.0 + draw.Uniform(-handle.steer_jitter, handle.steer_jitter);
        out.push_back(Synthesize(handle, state, lanes, accel, stage == 1,
                                 profile, steer, length, start_t, dt));
      }
    }
  }
  return out;
}

RewardTerms EgoTerms(const std::vector<AgentState>& ego_rollout,
                     const AgentState& start, const ActionTraj& ego,
                     const Context& ctx, int steps) {
  const int n = steps < 0 ? static_cast<int>(ego_rollout.size())
                          : std::min<int>(steps, ego_rollout.size());
  RewardTerms t;
  if (n == 0) return t;
  const LaneFrame lanes = LanesOf(ctx);
  t.progress = ego_rollout[static_cast<std::size_t>(n - 1)].x - start.x;
  double lane = 0.0;
  double control = 0.0;
  for (int k = 0; k < n; ++k) {
    const double off = ego_rollout[k].y - NearestLaneCenter(lanes, ego_rollout[k].y);
    lane += off * off;
    const Action& a = ego.actions[static_cast<std::size_t>(k)];
    control += a.accel * a.accel + a.turn_rate * a.turn_rate;
  }
  t.lane = lane / n;
  t.control = control;
  return t;
}

double OverlapSum(const std::vector<AgentState>& ego_rollout,
                  const std::vector<AgentState>& human_rollout,
                  double robot_radius, double human_radius, int steps) {
  const std::size_t n =
      std::min({ego_rollout.size(), human_rollout.size(),
                steps < 0 ? ego_rollout.size() : static_cast<std::size_t>(steps)});
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sum += FootprintOverlap(ego_rollout[k], human_rollout[k], robot_radius,
                            human_radius);
  }
  return sum;
}

RewardTerms ComputeRewardTerms(const ActionTraj& ego,
                               std::span<const ActionTraj> humans,
                               const JointState& joint, const Context& ctx,
                               const Footprints& footprints, double dt) {
  if (humans.size() != joint.humans.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "one trajectory per human is required");
  }
  const std::vector<AgentState> rollout = UnicycleRollout(joint.robot, ego, dt);
  RewardTerms terms = EgoTerms(rollout, joint.robot, ego, ctx);
  for (std::size_t i = 0; i < humans.size(); ++i) {
    if (humans[i].size() != ego.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "human and ego trajectories differ in length");
    }
    const std::vector<AgentState> hr =
        UnicycleRollout(joint.humans[i], humans[i], dt);
    terms.collision +=
        OverlapSum(rollout, hr, footprints.robot, footprints.humans.at(i));
  }
  return terms;
}

double Reward(const RewardWeights& weights, const ActionTraj& ego,
              std::span<const ActionTraj> humans, const JointState& joint,
              const Context& ctx, const Footprints& footprints, double dt) {
  return ComputeRewardTerms(ego, humans, joint, ctx, footprints, dt)
      .Total(weights);
}

int ArgmaxLowestIndex(std::span<const double> values) {
  if (values.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "argmax of an empty set");
  }
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

PlanResult ChooseCandidate(const PlannerHandle& handle,
                           const Predictor& predictor,
                           std::vector<ActionTraj> candidates,
                           const PlanQuery& q) {
  if (candidates.empty()) {
    throw Error(ErrorCode::kAborted, "planner produced no candidates");
  }
  const std::size_t m = q.joint.humans.size();
  const RewardWeights& w = handle.weights;

  ReplanEntry entry;
  entry.t = q.joint.t;
  entry.predicted_humans.reserve(candidates.size());
  entry.candidate_rewards_predicted.reserve(candidates.size());

  // Per candidate: robot rollout, prediction, and per-human per-mode overlap.
  std::vector<std::vector<AgentState>> rollouts;
  for (const ActionTraj& cand : candidates) {
    const std::vector<AgentState> rollout =
        UnicycleRollout(q.joint.robot, cand, q.dt);
    const PredictionQuery pq{q.joint, q.history, cand,  q.ctx,
                             handle.n_modes_out, q.dt, q.world};
    PredictionSet pred = predictor.Predict(pq);
    if (pred.humans.size() != m) {
      throw Error(ErrorCode::kInvalidArgument,
                  "prediction does not cover every human");
    }
    double expected = EgoTerms(rollout, q.joint.robot, cand, q.ctx).Total(w);
    for (std::size_t i = 0; i < m; ++i) {
      for (const ModePrediction& mode : pred.humans[i].modes) {
        const std::vector<AgentState> hr =
            UnicycleRollout(q.joint.humans[i], mode.traj, q.dt);
        expected += mode.probability * w.collision *
                    OverlapSum(rollout, hr, q.footprints.robot,
                               q.footprints.humans.at(i));
      }
    }
    entry.candidate_rewards_predicted.push_back(
        expected + handle.anticipated_reward_offset);
    entry.predicted_humans.push_back(std::move(pred));
    rollouts.push_back(rollout);
  }

  entry.executed_index = ArgmaxLowestIndex(entry.candidate_rewards_predicted);
  const auto e = static_cast<std::size_t>(entry.executed_index);

  // Anticipated reward of the executed segment under each joint mode.
  const int steps = std::min(q.execute_steps, candidates[e].size());
  DiscreteDistribution dist{
      {EgoTerms(rollouts[e], q.joint.robot, candidates[e], q.ctx, steps)
               .Total(w) +
           handle.anticipated_reward_offset,
       1.0}};
  for (std::size_t i = 0; i < m; ++i) {
    DiscreteDistribution human;
    for (const ModePrediction& mode : entry.predicted_humans[e].humans[i].modes) {
      const std::vector<AgentState> hr =
          UnicycleRollout(q.joint.humans[i], mode.traj, q.dt);
      human[w.collision * OverlapSum(rollouts[e], hr, q.footprints.robot,
                                     q.footprints.humans.at(i), steps)] +=
          mode.probability;
    }
    dist = Convolve(dist, human);
  }
  for (const auto& [value, weight] : dist) {
    entry.predicted_reward_samples.push_back(value);
    entry.predicted_reward_weights.push_back(weight);
  }

  // Keep rollouts only for the executed candidate to bound log size.
  for (std::size_t c = 0; c < entry.predicted_humans.size(); ++c) {
    if (c == e) continue;
    for (HumanPrediction& hp : entry.predicted_humans[c].humans) {
      for (ModePrediction& mode : hp.modes) mode.traj = {};
    }
  }

  PlanResult result;
  result.chosen = candidates[e];
  entry.candidates = std::move(candidates);
  result.entry = std::move(entry);
  return result;
}

PlanResult Plan(const PlannerHandle& handle, const Predictor& predictor,
                const PlanQuery& query, const RngStream& rng) {
  const int length = query.length > 0 ? query.length : handle.horizon;
  std::vector<ActionTraj> candidates = SampleCandidates(
      handle, query.joint.robot, query.ctx, rng, length, query.joint.t);
  return ChooseCandidate(handle, predictor, std::move(candidates), query);
}

}  // namespace regret_miner
