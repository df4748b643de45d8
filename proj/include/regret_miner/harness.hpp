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

// End-to-end pipelines: deploy a batch with the base predictor, score and
// mine it, split holdouts from fine-tuning pools, refit and redeploy.

#ifndef REGRET_MINER_HARNESS_HPP_
#define REGRET_MINER_HARNESS_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "regret_miner/baselines.hpp"
#include "regret_miner/planner.hpp"
#include "regret_miner/predictor.hpp"
#include "regret_miner/records.hpp"
#include "regret_miner/regret.hpp"
#include "regret_miner/simkit.hpp"

namespace regret_miner {

struct FamilyCount {
  ScenarioFamily family = ScenarioFamily::kStrandedTruck;
  int count = 0;
  friend bool operator==(const FamilyCount&, const FamilyCount&) = default;
};

struct HoldoutRule {
  // Percent of the high-regret and of the low-regret scenes held out, each
  // rounded up.
  double high_percent = 20.0;
  double low_percent = 20.0;
  friend bool operator==(const HoldoutRule&, const HoldoutRule&) = default;
};

struct ExperimentConfig {
  std::vector<FamilyCount> families = {
      {ScenarioFamily::kStrandedTruck, 20}, {ScenarioFamily::kStoppedTraffic, 20},
      {ScenarioFamily::kIntersection, 20},  {ScenarioFamily::kSparseCruise, 20},
      {ScenarioFamily::kNavWorld, 16}};
  std::uint64_t scenario_seed = 1;
  int horizon = kDefaultSceneHorizon;
  int replan_every = 10;
  // Fine-tuning seeds; each one redraws the random pool and re-seeds the
  // planner's candidate sampling on redeployment.
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  double p = 20.0;
  Aggregation aggregation = Aggregation::kMean;
  HoldoutRule holdout;
  // 0 matches |pool_high|.
  int finetune_size = 0;
  double finetune_blend = 0.5;
  PlannerHandle planner;
  // Constants for the base predictor; its counts come from pretraining.
  PredictorParams predictor;
  // Source-domain logs the base predictor is pretrained on.
  int pretrain_per_family = 12;
  std::uint64_t pretrain_seed = 99;
  std::string output_dir = "out";
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) =
      default;
};

void ValidateConfig(const ExperimentConfig& config);

// Every key is optional; unknown keys are rejected.
ExperimentConfig ConfigFromJson(std::string_view text);
std::string ConfigToJson(const ExperimentConfig& config);
// Hex digest of the canonical config document without output_dir.
std::string ConfigHash(const ExperimentConfig& config);

std::vector<ScenarioSpec> DeploymentSpecs(const ExperimentConfig& config);

// Closed-loop runs in parallel; output order follows `specs`.
std::vector<SceneRecord> RunScenes(std::span<const ScenarioSpec> specs,
                                   const PlannerHandle& planner,
                                   const Predictor& predictor, int replan_every,
                                   std::uint64_t planner_salt = 0);

// Fits the base predictor on oracle-driven source-domain logs.
PredictorParams PretrainBase(const ExperimentConfig& config);

struct Deployment {
  ExperimentConfig config;
  std::vector<ScenarioSpec> specs;
  PredictorParams base;
  std::vector<SceneRecord> scenes;
};

Deployment Deploy(const ExperimentConfig& config);

// Writes config.json, base_predictor.json, scenes.jsonl and manifest.json.
// Only the manifest's created_at differs between reruns.
void WriteDeployment(const Deployment& deployment, const std::string& dir);
Deployment ReadDeployment(const std::string& dir);

std::vector<RegretReport> ScoreScenes(std::span<const SceneRecord> scenes,
                                      const LikelihoodModel& model,
                                      Aggregation aggregation);

std::vector<ScoredId> ScoresOf(std::span<const RegretReport> reports);

struct Subsets {
  std::vector<std::string> high;  // mined, in rank order
  std::vector<std::string> holdout_high;
  std::vector<std::string> holdout_low;
  std::vector<std::string> pool_high;
  std::vector<std::string> pool_low;
  std::vector<std::string> pool_random;
  std::vector<std::string> pool_all;
};

// `finetune_size` 0 matches |pool_high|; larger than a pool is rejected.
Subsets BuildSubsets(std::span<const ScoredId> scores, double p,
                     const HoldoutRule& rule, int finetune_size,
                     const RngStream& rng);

// BuildSubsets with the config's p, holdout rule, size and holdout stream.
Subsets SubsetsFor(const ExperimentConfig& config,
                   std::span<const ScoredId> scores);

// Uniform draw without replacement of `n` ids.
std::vector<std::string> SampleWithoutReplacement(
    std::span<const std::string> pool, std::size_t n, const RngStream& rng);

std::string SubsetsToJson(const Subsets& subsets);

enum class Arm { kBase, kLowRegretFT, kRandomFT, kHighRegretFT, kAllFT };
enum class Split { kHighHoldout, kLowHoldout };
enum class CaseMetric { kCollisionCost, kCollisionSeverity, kMeanRegret, kAde, kFde };

inline constexpr std::array<Arm, 5> kAllArms = {
    Arm::kBase, Arm::kLowRegretFT, Arm::kRandomFT, Arm::kHighRegretFT,
    Arm::kAllFT};
inline constexpr std::array<Split, 2> kSplits = {Split::kHighHoldout,
                                                 Split::kLowHoldout};
inline constexpr std::array<CaseMetric, 5> kCaseMetrics = {
    CaseMetric::kCollisionCost, CaseMetric::kCollisionSeverity,
    CaseMetric::kMeanRegret, CaseMetric::kAde, CaseMetric::kFde};

// Short names used on the command line and in CSV: base, low, random, high,
// all.
std::string_view ArmName(Arm arm);
Arm ParseArm(std::string_view name);
std::string_view ArmLabel(Arm arm);
std::string_view SplitName(Split split);
Split ParseSplit(std::string_view name);
std::string_view CaseMetricName(CaseMetric metric);
CaseMetric ParseCaseMetric(std::string_view name);

struct MetricStats {
  std::vector<double> per_seed;
  double mean = 0.0;
  // Sample standard deviation; 0 for a single seed.
  double stddev = 0.0;
};

MetricStats Summarize(std::vector<double> per_seed);
double Median(std::vector<double> values);

struct ArmResult {
  Arm arm = Arm::kBase;
  // [split][metric]
  std::array<std::array<MetricStats, kCaseMetrics.size()>, kSplits.size()> cells;
};

struct CaseStudyReport {
  std::vector<std::uint64_t> seeds;
  std::vector<ArmResult> arms;

  const MetricStats& At(Arm arm, Split split, CaseMetric metric) const;
};

// Closed-loop metrics of one redeployed split.
struct SplitMetrics {
  double collision_cost = 0.0;      // mean total cost per scene
  double collision_severity = 0.0;  // pooled cost / pooled collision frames
  double mean_regret = 0.0;
  double ade = 0.0;
  double fde = 0.0;
};

SplitMetrics ComputeSplitMetrics(std::span<const SceneRecord> scenes,
                                 const RewardWeights& weights);

// Refits per arm and seed and redeploys every holdout scene. The Base arm
// keeps `base` but is still redeployed under each seed's planner salt.
CaseStudyReport FinetuneAndRedeploy(const ExperimentConfig& config,
                                    std::span<const ScenarioSpec> specs,
                                    std::span<const SceneRecord> scenes,
                                    const PredictorParams& base,
                                    const Subsets& subsets,
                                    std::span<const Arm> arms);

// Predictor used by `arm` under `seed`; exposed for the CLI.
PredictorParams ArmPredictor(const ExperimentConfig& config, Arm arm,
                             std::uint64_t seed,
                             std::span<const SceneRecord> scenes,
                             const PredictorParams& base,
                             const Subsets& subsets);

std::uint64_t PlannerSalt(std::uint64_t seed);

// ---------------------------------------------------------------------------
// Metric comparison.

struct Comparison {
  std::vector<MetricLabeling> labelings;
  // overlap[a][b] = |mined_a intersect mined_b| / |mined_a|; NaN when mined_a
  // is empty.
  std::vector<std::vector<double>> overlap;
};

Comparison CompareMetrics(std::span<const SceneRecord> scenes,
                          std::span<const MetricTag> metrics, double p,
                          const RewardWeights& weights,
                          Aggregation aggregation = Aggregation::kMean);

}  // namespace regret_miner

#endif  // REGRET_MINER_HARNESS_HPP_
