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

#include "regret_miner/serialize.hpp"

#include <cmath>
#include <filesystem>
#include <functional>

#include <gtest/gtest.h>

#include "regret_miner/planner.hpp"
#include "regret_miner/predictor.hpp"
#include "regret_miner/simkit.hpp"

namespace regret_miner {
namespace {

SceneRecord Sample(ScenarioFamily family) {
  const ScenarioSpec spec = GenerateScenarioBatch(family, 1, 6).front();
  return RunClosedLoop(spec, PlannerHandle{}, LearnedPredictor(PredictorParams{}), 10);
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kAborted;
}

TEST(SceneJson, RoundTrip) {
  for (ScenarioFamily f : {ScenarioFamily::kIntersection, ScenarioFamily::kNavWorld}) {
    const SceneRecord s = Sample(f);
    const std::string text = SceneToJson(s);
    EXPECT_EQ(text.find('\n'), std::string::npos);
    const SceneRecord back = SceneFromJson(text);
    EXPECT_EQ(back.scenario_id, s.scenario_id);
    EXPECT_EQ(back.context, s.context);
    EXPECT_EQ(back.states, s.states);
    EXPECT_EQ(back.replan_log, s.replan_log);
    EXPECT_EQ(back.human_actions, s.human_actions);
    EXPECT_EQ(back.executed_robot, s.executed_robot);
    EXPECT_EQ(back.per_frame_collision_cost, s.per_frame_collision_cost);
    EXPECT_EQ(SceneToJson(back), text);
  }
}

TEST(SceneJson, Rejects) {
  EXPECT_EQ(CodeOf([] { SceneFromJson("{not json"); }), ErrorCode::kSchema);
  EXPECT_EQ(CodeOf([] { SceneFromJson(R"({"schema":"predictor/1"})"); }),
            ErrorCode::kSchema);
  std::string text = SceneToJson(Sample(ScenarioFamily::kSparseCruise));
  text.replace(text.find("\"dt\":"), 5, "\"dx\":");
  EXPECT_EQ(CodeOf([&] { SceneFromJson(text); }), ErrorCode::kSchema);
}

TEST(PredictorJson, RoundTrip) {
  PredictorParams p;
  p.counts[3][1] = 2.5;
  p.counts[70][4] = 11.0;
  p.smoothing = 0.5;
  EXPECT_EQ(PredictorFromJson(PredictorToJson(p)), p);
}

TEST(RegretJson, RoundTrip) {
  RegretReport r;
  r.scenario_id = "x-001";
  r.aggregation = Aggregation::kWorst;
  r.per_t = {{0, 0.2, 0.7, 0.5}, {10, 0.1, 0.1, 0.0}};
  r.mean_regret = 0.25;
  r.worst_regret = 0.5;
  r.canonical_per_t = {3.0, 0.0};
  r.canonical_mean = 1.5;
  const RegretReport b = RegretFromJson(RegretToJson(r));
  EXPECT_EQ(b.scenario_id, r.scenario_id);
  EXPECT_EQ(b.aggregation, r.aggregation);
  EXPECT_EQ(b.per_t.size(), 2u);
  EXPECT_EQ(b.per_t[1].t, 10);
  EXPECT_EQ(b.per_t[0].regret, 0.5);
  EXPECT_EQ(b.canonical_per_t, r.canonical_per_t);
  EXPECT_EQ(b.score(), 0.5);
}

TEST(MinedJson, RoundTrip) {
  MinedSet m;
  m.metric = "rm";
  m.p = 15.0;
  m.k = 2;
  m.flagged = {"a", "b"};
  EXPECT_EQ(MinedFromJson(MinedToJson(m)), m);
}

TEST(NavJson, RoundTrip) {
  const auto data = GenerateNavDataset(60, 0.05, RngStream{1, 0});
  EXPECT_EQ(NavDatasetFromJson(NavDatasetToJson(data)), data);
  const Codebook cb = FitCodebook(GenerateNavDataset(600, 0.05, RngStream{1, 0}), 6);
  EXPECT_EQ(CodebookFromJson(CodebookToJson(cb)), cb);
}

TEST(Files, JsonlRoundTripAndMissingFile) {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "regret_miner_serialize_test";
  std::filesystem::create_directories(dir);
  const std::vector<SceneRecord> scenes = {Sample(ScenarioFamily::kStrandedTruck),
                                           Sample(ScenarioFamily::kSparseCruise)};
  const std::string path = (dir / "scenes.jsonl").string();
  WriteScenesJsonl(path, scenes);
  const auto back = ReadScenesJsonl(path);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].states, scenes[1].states);
  std::filesystem::remove_all(dir);
  EXPECT_EQ(CodeOf([&] { ReadFile((dir / "missing.json").string()); }), ErrorCode::kIo);
}

}  // namespace
}  // namespace regret_miner
