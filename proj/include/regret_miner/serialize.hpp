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

// Versioned JSON documents. Doubles are written in shortest round-trip form,
// so every value reads back bit-identical.

#ifndef REGRET_MINER_SERIALIZE_HPP_
#define REGRET_MINER_SERIALIZE_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "regret_miner/baselines.hpp"
#include "regret_miner/genplan.hpp"
#include "regret_miner/predictor.hpp"
#include "regret_miner/records.hpp"
#include "regret_miner/regret.hpp"

namespace regret_miner {

inline constexpr std::string_view kSceneSchema = "scene/1";
inline constexpr std::string_view kPredictorSchema = "predictor/1";
inline constexpr std::string_view kRegretSchema = "regret/1";
inline constexpr std::string_view kMinedSchema = "mined/1";
inline constexpr std::string_view kNavSchema = "nav/1";
inline constexpr std::string_view kCodebookSchema = "codebook/1";

// One line of a scene JSONL file (no trailing newline).
std::string SceneToJson(const SceneRecord& scene);
SceneRecord SceneFromJson(std::string_view text);

std::string PredictorToJson(const PredictorParams& params);
PredictorParams PredictorFromJson(std::string_view text);

std::string RegretToJson(const RegretReport& report);
RegretReport RegretFromJson(std::string_view text);

struct MinedSet {
  std::string metric = "grm";
  double p = 20.0;
  int k = 0;
  Aggregation aggregation = Aggregation::kMean;
  std::vector<std::string> flagged;
  friend bool operator==(const MinedSet&, const MinedSet&) = default;
};

std::string MinedToJson(const MinedSet& mined);
MinedSet MinedFromJson(std::string_view text);

std::string NavDatasetToJson(std::span<const NavSample> samples);
std::vector<NavSample> NavDatasetFromJson(std::string_view text);

std::string CodebookToJson(const Codebook& cb);
Codebook CodebookFromJson(std::string_view text);

// File helpers. Errors surface as kIo (filesystem) or kSchema (content).
std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view content);

void WriteScenesJsonl(const std::string& path,
                      std::span<const SceneRecord> scenes);
std::vector<SceneRecord> ReadScenesJsonl(const std::string& path);

void WriteRegretJsonl(const std::string& path,
                      std::span<const RegretReport> reports);
std::vector<RegretReport> ReadRegretJsonl(const std::string& path);

}  // namespace regret_miner

#endif  // REGRET_MINER_SERIALIZE_HPP_
