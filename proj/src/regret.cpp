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

#include "regret_miner/regret.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "regret_miner/planner.hpp"

namespace regret_miner {

std::string_view AggregationName(Aggregation agg) {
  return agg == Aggregation::kMean ? "mean" : "worst";
}

Aggregation ParseAggregation(std::string_view name) {
  if (name == "mean") return Aggregation::kMean;
  if (name == "worst") return Aggregation::kWorst;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown aggregation '" + std::string(name) + "'");
}

std::vector<double> SoftmaxLikelihoods(std::span<const double> rewards) {
  if (rewards.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "likelihoods of an empty set");
  }
  for (double r : rewards) {
    if (!std::isfinite(r)) {
      throw Error(ErrorCode::kNonFinite, "non-finite candidate reward");
    }
  }
  const double top = *std::max_element(rewards.begin(), rewards.end());
  std::vector<double> p(rewards.size());
  double total = 0.0;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    p[i] = std::exp(rewards[i] - top);
    total += p[i];
  }
  for (double& x : p) x /= total;
  return p;
}

std::vector<double> HindsightRewards(const RewardWeights& weights,
                                     const HindsightQuery& q) {
  if (q.candidates.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no candidates to evaluate");
  }
  std::vector<double> r;
  r.reserve(q.candidates.size());
  for (const ActionTraj& c : q.candidates) {
    r.push_back(Reward(weights, c, q.realized_humans, q.joint, q.ctx,
                       q.footprints, q.dt));
  }
  return r;
}

std::vector<double> LuceShepardLikelihoods(const RewardWeights& weights,
                                           const HindsightQuery& q) {
  return SoftmaxLikelihoods(HindsightRewards(weights, q));
}

namespace {

void CheckIndex(std::size_t n, int executed_index) {
  if (executed_index < 0 || static_cast<std::size_t>(executed_index) >= n) {
    throw Error(ErrorCode::kInvalidArgument, "executed index out of range");
  }
}

}  // namespace

double CanonicalRegretFromRewards(std::span<const double> rewards,
                                  int executed_index) {
  CheckIndex(rewards.size(), executed_index);
  const double top = *std::max_element(rewards.begin(), rewards.end());
  return top - rewards[static_cast<std::size_t>(executed_index)];
}

double CanonicalRegret(const RewardWeights& weights, const HindsightQuery& q,
                       int executed_index) {
  return CanonicalRegretFromRewards(HindsightRewards(weights, q),
                                    executed_index);
}

double GeneralizedRegretFromLikelihoods(std::span<const double> likelihoods,
                                        int executed_index) {
  CheckIndex(likelihoods.size(), executed_index);
  const double top = *std::max_element(likelihoods.begin(), likelihoods.end());
  return std::clamp(
      top - likelihoods[static_cast<std::size_t>(executed_index)], 0.0, 1.0);
}

double GeneralizedRegretT(const LuceShepardModel& model,
                          const HindsightQuery& q, int executed_index) {
  return GeneralizedRegretFromLikelihoods(
      LuceShepardLikelihoods(model.weights, q), executed_index);
}

std::vector<ActionTraj> RealizedHumans(const SceneRecord& scene,
                                       const ReplanEntry& entry) {
  const int len = entry.candidates.empty() ? 0 : entry.candidates.front().size();
  std::vector<ActionTraj> out;
  out.reserve(static_cast<std::size_t>(scene.num_humans()));
  for (int i = 0; i < scene.num_humans(); ++i) {
    ActionTraj seg = scene.HumanSegment(i, entry.t, len);
    if (seg.size() != len) {
      throw Error(ErrorCode::kSchema,
                  "realized human segment shorter than the candidates");
    }
    out.push_back(std::move(seg));
  }
  return out;
}

RegretReport ScoreScene(const LikelihoodModel& model, const SceneRecord& scene,
                        Aggregation aggregation) {
  const auto* luce = std::get_if<LuceShepardModel>(&model);
  if (luce == nullptr) {
    throw Error(ErrorCode::kInvalidArgument,
                "the generative model scores nav deployments, not scene logs");
  }
  if (scene.replan_log.empty()) {
    throw Error(ErrorCode::kSchema,
                "scene '" + scene.scenario_id + "' has no candidate log");
  }
  RegretReport report;
  report.scenario_id = scene.scenario_id;
  report.aggregation = aggregation;
  for (const ReplanEntry& e : scene.replan_log) {
    if (e.candidates.empty()) {
      throw Error(ErrorCode::kSchema, "replan entry without candidates");
    }
    if (e.t < 0 || e.t >= static_cast<int>(scene.states.size())) {
      throw Error(ErrorCode::kSchema, "replan time outside the scene");
    }
    const std::vector<ActionTraj> humans = RealizedHumans(scene, e);
    const HindsightQuery q{e.candidates, humans,
                           scene.states[static_cast<std::size_t>(e.t)],
                           scene.context, scene.footprints, scene.dt};
    const std::vector<double> rewards = HindsightRewards(luce->weights, q);
    const std::vector<double> p = SoftmaxLikelihoods(rewards);
    RegretStep step;
    step.t = e.t;
    step.executed_likelihood = p.at(static_cast<std::size_t>(e.executed_index));
    step.max_likelihood = *std::max_element(p.begin(), p.end());
    step.regret = GeneralizedRegretFromLikelihoods(p, e.executed_index);
    report.per_t.push_back(step);
    report.canonical_per_t.push_back(
        CanonicalRegretFromRewards(rewards, e.executed_index));
  }
  double sum = 0.0;
  for (const RegretStep& s : report.per_t) {
    sum += s.regret;
    report.worst_regret = std::max(report.worst_regret, s.regret);
  }
  report.mean_regret = sum / static_cast<double>(report.per_t.size());
  report.canonical_mean =
      std::accumulate(report.canonical_per_t.begin(),
                      report.canonical_per_t.end(), 0.0) /
      static_cast<double>(report.canonical_per_t.size());
  return report;
}

int QuantileCount(std::size_t n, double p) {
  if (!(p > 0.0 && p < 100.0)) {
    throw Error(ErrorCode::kInvalidArgument, "p must lie in (0, 100)");
  }
  const double raw = static_cast<double>(n) * p / 100.0;
  // 96 * 20 / 100 can land a hair above 19.2 or 20 exactly; only round up when
  // the excess is real.
  const double k = std::ceil(raw - 1e-9);
  return static_cast<int>(std::clamp(k, 0.0, static_cast<double>(n)));
}

std::vector<std::string> MineTopQuantile(std::span<const ScoredId> scores,
                                         double p) {
  if (scores.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no scores to mine");
  }
  for (const ScoredId& s : scores) {
    if (std::isnan(s.score)) {
      throw Error(ErrorCode::kNonFinite, "NaN score for '" + s.scenario_id + "'");
    }
  }
  const int k = QuantileCount(scores.size(), p);
  std::vector<const ScoredId*> order;
  order.reserve(scores.size());
  for (const ScoredId& s : scores) order.push_back(&s);
  std::sort(order.begin(), order.end(), [](const ScoredId* a, const ScoredId* b) {
    if (a->score != b->score) return a->score > b->score;
    return a->scenario_id < b->scenario_id;
  });
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) out.push_back(order[static_cast<std::size_t>(i)]->scenario_id);
  return out;
}

namespace {

CalibrationScene Evaluate(std::vector<double> rewards, int executed) {
  CalibrationScene s;
  s.rewards = std::move(rewards);
  s.executed_index = executed;
  s.canonical = CanonicalRegretFromRewards(s.rewards, executed);
  s.generalized =
      GeneralizedRegretFromLikelihoods(SoftmaxLikelihoods(s.rewards), executed);
  return s;
}

}  // namespace

CalibrationPair BuildCalibrationPair() {
  // Scene A: one clearly better alternative, executed far below it.
  CalibrationPair pair;
  pair.a = Evaluate({0.0, -11.4}, 1);
  // Scene B: a tight cluster of near-equal best candidates, the executed one
  // 11.7 below the best, and a couple of worse alternatives beneath it. Grow
  // the cluster until its probability mass is spread enough.
  for (int cluster = 1; cluster <= 64; ++cluster) {
    std::vector<double> rewards;
    for (int i = 0; i < cluster; ++i) {
      rewards.push_back(cluster == 1 ? 0.0 : -0.2 * i / (cluster - 1));
    }
    const int executed = static_cast<int>(rewards.size());
    rewards.push_back(-11.7);
    rewards.push_back(-14.0);
    rewards.push_back(-18.0);
    CalibrationScene b = Evaluate(std::move(rewards), executed);
    const double canon_gap = std::abs(pair.a.canonical - b.canonical) /
                             std::max(pair.a.canonical, b.canonical);
    if (canon_gap < 0.05 && pair.a.generalized >= 1.5 * b.generalized) {
      pair.b = std::move(b);
      return pair;
    }
  }
  throw Error(ErrorCode::kAborted, "calibration search found no pair");
}

}  // namespace regret_miner
