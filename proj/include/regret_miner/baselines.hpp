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

// Competing failure metrics and overlap between mined sets.

#ifndef REGRET_MINER_BASELINES_HPP_
#define REGRET_MINER_BASELINES_HPP_

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "regret_miner/records.hpp"

namespace regret_miner {

enum class MetricTag { kGrm, kRm, kAde, kTrfd };

std::string_view MetricName(MetricTag tag);
MetricTag ParseMetric(std::string_view name);

struct MetricLabeling {
  MetricTag tag = MetricTag::kGrm;
  std::vector<std::string> ids;
  // Per-scene score (GRM, RM, ADE) or 0/1 flag (TRFD), parallel to ids.
  std::vector<double> values;
  std::vector<std::string> mined;
};

struct AdeScore {
  double score = 0.0;
  // Mean final displacement over the same pairs.
  double fde = 0.0;
  int pairs = 0;
  // Set when the scene has no humans to evaluate.
  bool no_humans = false;
};

// Mean ADE over (human, replan) pairs between the most likely logged mode
// for the executed candidate and the realized motion over the executed
// segment.
AdeScore AdeSceneScore(const SceneRecord& scene);

// Realized reward of the executed segments against realized humans, summed
// over replans.
double RealizedSceneReward(const SceneRecord& scene);

struct TrfdResult {
  bool flagged = false;
  double realized = 0.0;
  double quantile = 0.0;
};

// Flags the scene when its realized reward falls below the lower p-quantile
// of the anticipated scene reward (the per-replan anticipated distributions
// summed as independent variables).
TrfdResult TrfdFlag(const SceneRecord& scene, double p);

// |a intersect b| / |a|.
double Overlap(const std::set<std::string>& a, const std::set<std::string>& b);

}  // namespace regret_miner

#endif  // REGRET_MINER_BASELINES_HPP_
