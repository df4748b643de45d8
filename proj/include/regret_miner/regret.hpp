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

// Canonical and likelihood-space regret, scene aggregation and top-quantile
// mining.

#ifndef REGRET_MINER_REGRET_HPP_
#define REGRET_MINER_REGRET_HPP_

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "regret_miner/core.hpp"
#include "regret_miner/genplan.hpp"
#include "regret_miner/records.hpp"

namespace regret_miner {

struct LuceShepardModel {
  RewardWeights weights;
};

struct GenerativeKdeModel {
  Codebook codebook;
  KdeSettings kde;
  RngStream stream{0, 0};
};

using LikelihoodModel = std::variant<LuceShepardModel, GenerativeKdeModel>;

enum class Aggregation { kMean, kWorst };

std::string_view AggregationName(Aggregation agg);
Aggregation ParseAggregation(std::string_view name);

struct RegretStep {
  int t = 0;
  double executed_likelihood = 0.0;
  double max_likelihood = 0.0;
  double regret = 0.0;
};

struct RegretReport {
  std::string scenario_id;
  Aggregation aggregation = Aggregation::kMean;
  std::vector<RegretStep> per_t;
  double mean_regret = 0.0;
  double worst_regret = 0.0;
  std::vector<double> canonical_per_t;
  double canonical_mean = 0.0;

  // The aggregate selected by `aggregation`.
  double score() const {
    return aggregation == Aggregation::kMean ? mean_regret : worst_regret;
  }
};

// Softmax with max-subtraction.
std::vector<double> SoftmaxLikelihoods(std::span<const double> rewards);

// Everything needed to re-score a candidate set against realized behavior.
struct HindsightQuery {
  std::span<const ActionTraj> candidates;
  std::span<const ActionTraj> realized_humans;
  const JointState& joint;
  const Context& ctx;
  const Footprints& footprints;
  double dt = kDefaultDt;
};

std::vector<double> HindsightRewards(const RewardWeights& weights,
                                     const HindsightQuery& q);

std::vector<double> LuceShepardLikelihoods(const RewardWeights& weights,
                                           const HindsightQuery& q);

double CanonicalRegretFromRewards(std::span<const double> rewards,
                                  int executed_index);
double CanonicalRegret(const RewardWeights& weights, const HindsightQuery& q,
                       int executed_index);

// max_i p_i - p_executed.
double GeneralizedRegretFromLikelihoods(std::span<const double> likelihoods,
                                        int executed_index);
double GeneralizedRegretT(const LuceShepardModel& model, const HindsightQuery& q,
                          int executed_index);

// Realized human segments aligned with a replan entry's candidates.
std::vector<ActionTraj> RealizedHumans(const SceneRecord& scene,
                                       const ReplanEntry& entry);

RegretReport ScoreScene(const LikelihoodModel& model, const SceneRecord& scene,
                        Aggregation aggregation = Aggregation::kMean);

struct ScoredId {
  std::string scenario_id;
  double score = 0.0;
};

// ceil(N * p / 100) with a guard against rounding just above an integer.
int QuantileCount(std::size_t n, double p);

// Top-k by score, ties broken by ascending scenario id. Returned in that
// order.
std::vector<std::string> MineTopQuantile(std::span<const ScoredId> scores,
                                         double p);

struct CalibrationScene {
  std::vector<double> rewards;
  int executed_index = 0;
  double canonical = 0.0;
  double generalized = 0.0;
};

struct CalibrationPair {
  CalibrationScene a;
  CalibrationScene b;
};

// Two candidate sets with near-equal canonical regret whose likelihood-space
// regrets differ by at least 1.5x.
CalibrationPair BuildCalibrationPair();

}  // namespace regret_miner

#endif  // REGRET_MINER_REGRET_HPP_
