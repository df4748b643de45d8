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

#include <algorithm>
#include <cmath>

#include "regret_miner/distribution.hpp"
#include "regret_miner/planner.hpp"
#include "regret_miner/predictor.hpp"

namespace regret_miner {

std::string_view MetricName(MetricTag tag) {
  switch (tag) {
    case MetricTag::kGrm:
      return "grm";
    case MetricTag::kRm:
      return "rm";
    case MetricTag::kAde:
      return "ade";
    case MetricTag::kTrfd:
      return "trfd";
  }
  return "grm";
}

MetricTag ParseMetric(std::string_view name) {
  for (MetricTag t : {MetricTag::kGrm, MetricTag::kRm, MetricTag::kAde,
                      MetricTag::kTrfd}) {
    if (MetricName(t) == name) return t;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown metric '" + std::string(name) + "'");
}

AdeScore AdeSceneScore(const SceneRecord& scene) {
  AdeScore out;
  if (scene.num_humans() == 0) {
    out.no_humans = true;
    return out;
  }
  double sum = 0.0;
  double final_sum = 0.0;
  for (std::size_t r = 0; r < scene.replan_log.size(); ++r) {
    const ReplanEntry& e = scene.replan_log[r];
    const int steps = scene.executed_robot.at(r).size();
    const PredictionSet& pred =
        e.predicted_humans.at(static_cast<std::size_t>(e.executed_index));
    const JointState& start = scene.states.at(static_cast<std::size_t>(e.t));
    for (int i = 0; i < scene.num_humans(); ++i) {
      const ModePrediction& mode =
          pred.humans.at(static_cast<std::size_t>(i)).MostLikely();
      if (mode.traj.size() < steps) {
        throw Error(ErrorCode::kSchema,
                    "executed-candidate prediction missing from the log");
      }
      const std::vector<AgentState> predicted = UnicycleRollout(
          start.humans[static_cast<std::size_t>(i)], mode.traj.Prefix(steps),
          scene.dt);
      std::vector<Vec2> truth;
      for (int k = 1; k <= steps; ++k) {
        truth.push_back(scene.states.at(static_cast<std::size_t>(e.t + k))
                            .humans[static_cast<std::size_t>(i)]
                            .position());
      }
      const DisplacementError err = AdeFde(Positions(predicted), truth);
      sum += err.ade;
      final_sum += err.fde;
      ++out.pairs;
    }
  }
  out.score = out.pairs > 0 ? sum / out.pairs : 0.0;
  out.fde = out.pairs > 0 ? final_sum / out.pairs : 0.0;
  return out;
}

double RealizedSceneReward(const SceneRecord& scene) {
  double total = 0.0;
  for (std::size_t r = 0; r < scene.replan_log.size(); ++r) {
    const ReplanEntry& e = scene.replan_log[r];
    const ActionTraj& seg = scene.executed_robot.at(r);
    std::vector<ActionTraj> humans;
    for (int i = 0; i < scene.num_humans(); ++i) {
      humans.push_back(scene.HumanSegment(i, e.t, seg.size()));
    }
    total += Reward(scene.reward_weights, seg, humans,
                    scene.states.at(static_cast<std::size_t>(e.t)),
                    scene.context, scene.footprints, scene.dt);
  }
  return total;
}

TrfdResult TrfdFlag(const SceneRecord& scene, double p) {
  if (!(p > 0.0 && p < 100.0)) {
    throw Error(ErrorCode::kInvalidArgument, "p must lie in (0, 100)");
  }
  if (scene.replan_log.empty()) {
    throw Error(ErrorCode::kSchema, "scene has no replan log");
  }
  DiscreteDistribution total{{0.0, 1.0}};
  for (const ReplanEntry& e : scene.replan_log) {
    if (e.predicted_reward_samples.empty()) {
      throw Error(ErrorCode::kSchema,
                  "replan entry at t=" + std::to_string(e.t) +
                      " has no anticipated reward samples");
    }
    total = Convolve(total, FromWeighted(e.predicted_reward_samples,
                                         e.predicted_reward_weights));
  }
  TrfdResult out;
  out.realized = RealizedSceneReward(scene);
  out.quantile = LowerQuantile(total, p / 100.0);
  // Summation order differs between the two sides; ignore rounding noise.
  const double tol = 1e-9 * (1.0 + std::abs(out.quantile));
  out.flagged = out.realized < out.quantile - tol;
  return out;
}

double Overlap(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "overlap needs a non-empty set");
  }
  std::size_t common = 0;
  for (const std::string& id : a) common += b.count(id);
  return static_cast<double>(common) / static_cast<double>(a.size());
}

}  // namespace regret_miner
