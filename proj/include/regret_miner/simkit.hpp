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

// Closed-loop deployment engine and scenario families.

#ifndef REGRET_MINER_SIMKIT_HPP_
#define REGRET_MINER_SIMKIT_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "regret_miner/planner.hpp"
#include "regret_miner/predictor.hpp"
#include "regret_miner/records.hpp"
#include "regret_miner/world.hpp"

namespace regret_miner {

// Number of prior joint states handed to the predictor at each replan.
inline constexpr int kPlannerHistory = 8;

// Runs one scene: replan every `replan_every` steps, execute the head of the
// chosen candidate, log everything needed for offline scoring. A non-zero
// `planner_salt` re-seeds candidate sampling without touching the humans.
SceneRecord RunClosedLoop(const ScenarioSpec& spec,
                          const PlannerHandle& planner,
                          const Predictor& predictor, int replan_every,
                          std::uint64_t planner_salt = 0);

// Re-integrates a record's executed robot actions and logged human actions.
std::vector<JointState> ReplayScene(const SceneRecord& scene);

enum class ScenarioFamily {
  kStrandedTruck,
  kStoppedTraffic,
  kIntersection,
  kSparseCruise,
  kNavWorld,
};

std::string_view FamilyName(ScenarioFamily family);
ScenarioFamily ParseFamily(std::string_view name);

struct FamilyOptions {
  int horizon = kDefaultSceneHorizon;
  // Variant used to pretrain the base predictor: no stranded agents, stopped
  // cars always resume, crossers always yield.
  bool source_domain = false;
};

std::vector<ScenarioSpec> GenerateScenarioBatch(ScenarioFamily family, int n,
                                                std::uint64_t base_seed,
                                                const FamilyOptions& options = {});

}  // namespace regret_miner

#endif  // REGRET_MINER_SIMKIT_HPP_
