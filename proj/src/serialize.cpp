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
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace regret_miner {

using Json = nlohmann::ordered_json;

namespace {

[[noreturn]] void SchemaError(const std::string& what) {
  throw Error(ErrorCode::kSchema, what);
}

Json Parse(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    SchemaError(std::string("malformed JSON: ") + e.what());
  }
}

void ExpectSchema(const Json& j, std::string_view schema) {
  if (!j.is_object() || !j.contains("schema") ||
      j["schema"] != std::string(schema)) {
    SchemaError("expected a \"" + std::string(schema) + "\" document");
  }
}

const Json& At(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    SchemaError(std::string("missing field '") + key + "'");
  }
  return j[key];
}

// JSON cannot carry inf or NaN; refuse them rather than write null.
double Finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::kNonFinite, std::string("non-finite ") + what);
  }
  return v;
}

template <typename T>
T Get(const Json& j, const char* key) {
  try {
    return At(j, key).get<T>();
  } catch (const Json::type_error& e) {
    SchemaError(std::string("field '") + key + "': " + e.what());
  }
}

Json VecToJson(const Vec2& v) { return Json::array({v.x, v.y}); }

Vec2 VecFromJson(const Json& j) {
  if (!j.is_array() || j.size() != 2) SchemaError("expected an [x, y] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json StateToJson(const AgentState& s) {
  return Json{{"x", Finite(s.x, "x")},
              {"y", Finite(s.y, "y")},
              {"heading", Finite(s.heading, "heading")},
              {"speed", Finite(s.speed, "speed")}};
}

AgentState StateFromJson(const Json& j) {
  return {Get<double>(j, "x"), Get<double>(j, "y"), Get<double>(j, "heading"),
          Get<double>(j, "speed")};
}

Json JointToJson(const JointState& js) {
  Json humans = Json::array();
  for (const AgentState& h : js.humans) humans.push_back(StateToJson(h));
  return Json{{"t", js.t}, {"robot", StateToJson(js.robot)}, {"humans", humans}};
}

JointState JointFromJson(const Json& j) {
  JointState js;
  js.t = Get<int>(j, "t");
  js.robot = StateFromJson(At(j, "robot"));
  for (const Json& h : At(j, "humans")) js.humans.push_back(StateFromJson(h));
  return js;
}

// Actions are written as [accel, turn_rate] pairs to keep the logs compact.
Json TrajToJson(const ActionTraj& traj) {
  Json actions = Json::array();
  for (const Action& a : traj.actions) {
    actions.push_back(Json::array(
        {Finite(a.accel, "accel"), Finite(a.turn_rate, "turn_rate")}));
  }
  return Json{{"start_t", traj.start_t}, {"actions", actions}};
}

ActionTraj TrajFromJson(const Json& j) {
  ActionTraj traj;
  traj.start_t = Get<int>(j, "start_t");
  for (const Json& a : At(j, "actions")) {
    if (!a.is_array() || a.size() != 2) {
      SchemaError("expected an [accel, turn_rate] pair");
    }
    traj.actions.push_back({a[0].get<double>(), a[1].get<double>()});
  }
  return traj;
}

Json TrajListToJson(const std::vector<ActionTraj>& list) {
  Json out = Json::array();
  for (const ActionTraj& t : list) out.push_back(TrajToJson(t));
  return out;
}

std::vector<ActionTraj> TrajListFromJson(const Json& j) {
  std::vector<ActionTraj> out;
  for (const Json& t : j) out.push_back(TrajFromJson(t));
  return out;
}

Json ContextToJson(const Context& ctx) {
  if (const auto* road = std::get_if<DrivingCorridor>(&ctx)) {
    return Json{{"type", "DrivingCorridor"},
                {"lane_centers", road->lane_centers},
                {"lane_width", road->lane_width},
                {"length", road->length},
                {"speed_limit", road->speed_limit}};
  }
  const auto& nav = std::get<NavWorld>(ctx);
  return Json{{"type", "NavWorld"},
              {"goal_primary", VecToJson(nav.goal_primary)},
              {"goal_backup", VecToJson(nav.goal_backup)},
              {"human_start", VecToJson(nav.human_start)},
              {"robot_start", VecToJson(nav.robot_start)},
              {"speed_limit", nav.speed_limit}};
}

Context ContextFromJson(const Json& j) {
  const auto type = Get<std::string>(j, "type");
  if (type == "DrivingCorridor") {
    DrivingCorridor road;
    road.lane_centers = Get<std::vector<double>>(j, "lane_centers");
    road.lane_width = Get<double>(j, "lane_width");
    road.length = Get<double>(j, "length");
    road.speed_limit = Get<double>(j, "speed_limit");
    return road;
  }
  if (type == "NavWorld") {
    NavWorld nav;
    nav.goal_primary = VecFromJson(At(j, "goal_primary"));
    nav.goal_backup = VecFromJson(At(j, "goal_backup"));
    nav.human_start = VecFromJson(At(j, "human_start"));
    nav.robot_start = VecFromJson(At(j, "robot_start"));
    nav.speed_limit = Get<double>(j, "speed_limit");
    return nav;
  }
  SchemaError("unknown context type '" + type + "'");
}

Json PredictionToJson(const PredictionSet& set) {
  Json humans = Json::array();
  for (const HumanPrediction& h : set.humans) {
    Json modes = Json::array();
    for (const ModePrediction& m : h.modes) {
      Json mj{{"mode", BehaviorModeName(m.mode)},
              {"probability", Finite(m.probability, "probability")}};
      if (!m.traj.empty()) mj["traj"] = TrajToJson(m.traj);
      modes.push_back(std::move(mj));
    }
    humans.push_back(Json{{"modes", modes}});
  }
  return Json{{"humans", humans}};
}

PredictionSet PredictionFromJson(const Json& j) {
  PredictionSet set;
  for (const Json& hj : At(j, "humans")) {
    HumanPrediction h;
    for (const Json& mj : At(hj, "modes")) {
      ModePrediction m;
      m.mode = ParseBehaviorMode(Get<std::string>(mj, "mode"));
      m.probability = Get<double>(mj, "probability");
      if (mj.contains("traj")) m.traj = TrajFromJson(mj["traj"]);
      h.modes.push_back(std::move(m));
    }
    set.humans.push_back(std::move(h));
  }
  return set;
}

Json ReplanToJson(const ReplanEntry& e) {
  Json predicted = Json::array();
  for (const PredictionSet& p : e.predicted_humans) {
    predicted.push_back(PredictionToJson(p));
  }
  return Json{{"t", e.t},
              {"candidates", TrajListToJson(e.candidates)},
              {"predicted_humans", predicted},
              {"candidate_rewards_predicted", e.candidate_rewards_predicted},
              {"executed_index", e.executed_index},
              {"predicted_reward_samples", e.predicted_reward_samples},
              {"predicted_reward_weights", e.predicted_reward_weights}};
}

ReplanEntry ReplanFromJson(const Json& j) {
  ReplanEntry e;
  e.t = Get<int>(j, "t");
  e.candidates = TrajListFromJson(At(j, "candidates"));
  for (const Json& p : At(j, "predicted_humans")) {
    e.predicted_humans.push_back(PredictionFromJson(p));
  }
  e.candidate_rewards_predicted =
      Get<std::vector<double>>(j, "candidate_rewards_predicted");
  e.executed_index = Get<int>(j, "executed_index");
  e.predicted_reward_samples =
      Get<std::vector<double>>(j, "predicted_reward_samples");
  e.predicted_reward_weights =
      Get<std::vector<double>>(j, "predicted_reward_weights");
  return e;
}

void CheckFinite(const std::vector<double>& v, const char* what) {
  for (double x : v) Finite(x, what);
}

}  // namespace

// ---------------------------------------------------------------------------

std::string SceneToJson(const SceneRecord& scene) {
  for (const ReplanEntry& e : scene.replan_log) {
    CheckFinite(e.candidate_rewards_predicted, "predicted reward");
    CheckFinite(e.predicted_reward_samples, "reward sample");
    CheckFinite(e.predicted_reward_weights, "reward weight");
  }
  CheckFinite(scene.per_frame_collision_cost, "collision cost");
  Json states = Json::array();
  for (const JointState& s : scene.states) states.push_back(JointToJson(s));
  Json log = Json::array();
  for (const ReplanEntry& e : scene.replan_log) log.push_back(ReplanToJson(e));
  const RewardWeights& w = scene.reward_weights;
  Json j{
      {"schema", kSceneSchema},
      {"scenario_id", scene.scenario_id},
      {"family", scene.family},
      {"context", ContextToJson(scene.context)},
      {"dt", scene.dt},
      {"replan_every", scene.replan_every},
      {"footprints",
       Json{{"robot", scene.footprints.robot},
            {"humans", scene.footprints.humans}}},
      {"reward_weights",
       Json{{"progress", w.progress},
            {"lane", w.lane},
            {"collision", w.collision},
            {"control", w.control}}},
      {"states", states},
      {"executed_robot", TrajListToJson(scene.executed_robot)},
      {"human_actions", TrajListToJson(scene.human_actions)},
      {"replan_log", log},
      {"per_frame_collision_cost", scene.per_frame_collision_cost},
      {"aborted", scene.aborted},
      {"diagnostic", scene.diagnostic},
  };
  return j.dump();
}

SceneRecord SceneFromJson(std::string_view text) {
  const Json j = Parse(text);
  ExpectSchema(j, kSceneSchema);
  SceneRecord s;
  try {
    s.scenario_id = Get<std::string>(j, "scenario_id");
    s.family = Get<std::string>(j, "family");
    s.context = ContextFromJson(At(j, "context"));
    s.dt = Get<double>(j, "dt");
    s.replan_every = Get<int>(j, "replan_every");
    const Json& fp = At(j, "footprints");
    s.footprints.robot = Get<double>(fp, "robot");
    s.footprints.humans = Get<std::vector<double>>(fp, "humans");
    const Json& w = At(j, "reward_weights");
    s.reward_weights = {Get<double>(w, "progress"), Get<double>(w, "lane"),
                        Get<double>(w, "collision"), Get<double>(w, "control")};
    for (const Json& st : At(j, "states")) s.states.push_back(JointFromJson(st));
    s.executed_robot = TrajListFromJson(At(j, "executed_robot"));
    s.human_actions = TrajListFromJson(At(j, "human_actions"));
    for (const Json& e : At(j, "replan_log")) {
      s.replan_log.push_back(ReplanFromJson(e));
    }
    s.per_frame_collision_cost =
        Get<std::vector<double>>(j, "per_frame_collision_cost");
    s.aborted = Get<bool>(j, "aborted");
    s.diagnostic = Get<std::string>(j, "diagnostic");
  } catch (const Json::exception& e) {
    SchemaError(std::string("scene record: ") + e.what());
  }
  return s;
}

std::string PredictorToJson(const PredictorParams& params) {
  ValidateParams(params);
  Json counts = Json::array();
  for (const ModeVector& c : params.counts) {
    counts.push_back(std::vector<double>(c.begin(), c.end()));
  }
  // Logits are derived from the counts; they are written for inspection and
  // ignored on load.
  Json logits = Json::array();
  for (int b = 0; b < kNumBuckets; ++b) {
    const ModeVector l = params.Logits(b);
    logits.push_back(std::vector<double>(l.begin(), l.end()));
  }
  Json modes = Json::array();
  for (int m = 0; m < kNumBehaviorModes; ++m) {
    modes.push_back(BehaviorModeName(static_cast<BehaviorMode>(m)));
  }
  Json j{{"schema", kPredictorSchema},
         {"modes", modes},
         {"counts", counts},
         {"mode_logits", logits},
         {"smoothing", params.smoothing},
         {"history_window", params.history_window},
         {"approach_radius", params.approach_radius},
         {"yield_radius", params.yield_radius},
         {"resume_speed", params.resume_speed},
         {"resume_accel", params.resume_accel},
         {"label_window", params.label_window}};
  return j.dump(2);
}

PredictorParams PredictorFromJson(std::string_view text) {
  const Json j = Parse(text);
  ExpectSchema(j, kPredictorSchema);
  PredictorParams p;
  try {
    const auto counts = Get<std::vector<std::vector<double>>>(j, "counts");
    if (counts.size() != static_cast<std::size_t>(kNumBuckets)) {
      SchemaError("predictor counts must have one row per bucket");
    }
    for (std::size_t b = 0; b < counts.size(); ++b) {
      if (counts[b].size() != static_cast<std::size_t>(kNumBehaviorModes)) {
        SchemaError("predictor count rows must have one entry per mode");
      }
      std::copy(counts[b].begin(), counts[b].end(), p.counts[b].begin());
    }
    p.smoothing = Get<double>(j, "smoothing");
    p.history_window = Get<int>(j, "history_window");
    p.approach_radius = Get<double>(j, "approach_radius");
    p.yield_radius = Get<double>(j, "yield_radius");
    p.resume_speed = Get<double>(j, "resume_speed");
    p.resume_accel = Get<double>(j, "resume_accel");
    p.label_window = Get<int>(j, "label_window");
  } catch (const Json::exception& e) {
    SchemaError(std::string("predictor: ") + e.what());
  }
  try {
    ValidateParams(p);
  } catch (const Error& e) {
    SchemaError(e.what());
  }
  return p;
}

std::string RegretToJson(const RegretReport& r) {
  Json per_t = Json::array();
  for (const RegretStep& s : r.per_t) {
    per_t.push_back(Json{{"t", s.t},
                         {"executed_likelihood", s.executed_likelihood},
                         {"max_likelihood", s.max_likelihood},
                         {"regret", s.regret}});
  }
  Json j{{"schema", kRegretSchema},
         {"scenario_id", r.scenario_id},
         {"aggregation", AggregationName(r.aggregation)},
         {"per_t", per_t},
         {"mean_regret", r.mean_regret},
         {"worst_regret", r.worst_regret},
         {"canonical_per_t", r.canonical_per_t},
         {"canonical_mean", r.canonical_mean}};
  return j.dump();
}

RegretReport RegretFromJson(std::string_view text) {
  const Json j = Parse(text);
  ExpectSchema(j, kRegretSchema);
  RegretReport r;
  try {
    r.scenario_id = Get<std::string>(j, "scenario_id");
    r.aggregation = ParseAggregation(Get<std::string>(j, "aggregation"));
    for (const Json& s : At(j, "per_t")) {
      r.per_t.push_back({Get<int>(s, "t"), Get<double>(s, "executed_likelihood"),
                         Get<double>(s, "max_likelihood"),
                         Get<double>(s, "regret")});
    }
    r.mean_regret = Get<double>(j, "mean_regret");
    r.worst_regret = Get<double>(j, "worst_regret");
    r.canonical_per_t = Get<std::vector<double>>(j, "canonical_per_t");
    r.canonical_mean = Get<double>(j, "canonical_mean");
  } catch (const Json::exception& e) {
    SchemaError(std::string("regret report: ") + e.what());
  }
  return r;
}

std::string MinedToJson(const MinedSet& m) {
  Json j{{"schema", kMinedSchema},
         {"metric", m.metric},
         {"p", m.p},
         {"k", m.k},
         {"aggregation", AggregationName(m.aggregation)},
         {"flagged", m.flagged}};
  return j.dump(2);
}

MinedSet MinedFromJson(std::string_view text) {
  const Json j = Parse(text);
  ExpectSchema(j, kMinedSchema);
  MinedSet m;
  try {
    m.metric = Get<std::string>(j, "metric");
    m.p = Get<double>(j, "p");
    m.k = Get<int>(j, "k");
    m.aggregation = ParseAggregation(Get<std::string>(j, "aggregation"));
    m.flagged = Get<std::vector<std::string>>(j, "flagged");
  } catch (const Json::exception& e) {
    SchemaError(std::string("mined set: ") + e.what());
  }
  return m;
}

std::string NavDatasetToJson(std::span<const NavSample> samples) {
  Json arr = Json::array();
  for (const NavSample& s : samples) {
    arr.push_back(Json{{"delta_h", s.delta_h},
                       {"goal", NavGoalName(s.goal)},
                       {"human_traj", s.human_traj},
                       {"robot_traj", s.robot_traj},
                       {"outcome_class", s.outcome_class},
                       {"triggered", s.triggered},
                       {"switched", s.switched}});
  }
  return Json{{"schema", kNavSchema}, {"samples", arr}}.dump();
}

std::vector<NavSample> NavDatasetFromJson(std::string_view text) {
  const Json j = Parse(text);
  ExpectSchema(j, kNavSchema);
  std::vector<NavSample> out;
  try {
    for (const Json& sj : At(j, "samples")) {
      NavSample s;
      s.delta_h = Get<double>(sj, "delta_h");
      s.goal = ParseNavGoal(Get<std::string>(sj, "goal"));
      s.human_traj = Get<std::vector<double>>(sj, "human_traj");
      s.robot_traj = Get<std::vector<double>>(sj, "robot_traj");
      s.outcome_class = Get<int>(sj, "outcome_class");
      s.triggered = Get<bool>(sj, "triggered");
      s.switched = Get<bool>(sj, "switched");
      if (s.human_traj.size() != kNavSteps || s.robot_traj.size() != kNavSteps) {
        SchemaError("nav trajectories must have exactly 6 steps");
      }
      out.push_back(std::move(s));
    }
  } catch (const Json::exception& e) {
    SchemaError(std::string("nav dataset: ") + e.what());
  }
  return out;
}

std::string CodebookToJson(const Codebook& cb) {
  ValidateCodebook(cb);
  Json j{{"schema", kCodebookSchema},
         {"K", cb.K},
         {"robot_len", cb.robot_len},
         {"human_len", cb.human_len},
         {"encoder", cb.encoder},
         {"mean", cb.mean},
         {"var", cb.var},
         {"noise_sigma", cb.noise_sigma},
         {"pseudo_count", cb.pseudo_count}};
  return j.dump(2);
}

Codebook CodebookFromJson(std::string_view text) {
  const Json j = Parse(text);
  ExpectSchema(j, kCodebookSchema);
  Codebook cb;
  try {
    cb.K = Get<int>(j, "K");
    cb.robot_len = Get<int>(j, "robot_len");
    cb.human_len = Get<int>(j, "human_len");
    cb.encoder = Get<std::vector<std::vector<double>>>(j, "encoder");
    cb.mean = Get<std::vector<std::vector<double>>>(j, "mean");
    cb.var = Get<std::vector<std::vector<double>>>(j, "var");
    cb.noise_sigma = Get<double>(j, "noise_sigma");
    cb.pseudo_count = Get<double>(j, "pseudo_count");
  } catch (const Json::exception& e) {
    SchemaError(std::string("codebook: ") + e.what());
  }
  try {
    ValidateCodebook(cb);
  } catch (const Error& e) {
    SchemaError(e.what());
  }
  return cb;
}

// ---------------------------------------------------------------------------

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::kIo, "write to '" + path + "' failed");
}

namespace {

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(std::move(line));
  }
  return out;
}

}  // namespace

void WriteScenesJsonl(const std::string& path,
                      std::span<const SceneRecord> scenes) {
  std::string out;
  for (const SceneRecord& s : scenes) {
    out += SceneToJson(s);
    out += '\n';
  }
  WriteFile(path, out);
}

std::vector<SceneRecord> ReadScenesJsonl(const std::string& path) {
  std::vector<SceneRecord> out;
  for (const std::string& line : Lines(ReadFile(path))) {
    out.push_back(SceneFromJson(line));
  }
  return out;
}

void WriteRegretJsonl(const std::string& path,
                      std::span<const RegretReport> reports) {
  std::string out;
  for (const RegretReport& r : reports) {
    out += RegretToJson(r);
    out += '\n';
  }
  WriteFile(path, out);
}

std::vector<RegretReport> ReadRegretJsonl(const std::string& path) {
  std::vector<RegretReport> out;
  for (const std::string& line : Lines(ReadFile(path))) {
    out.push_back(RegretFromJson(line));
  }
  return out;
}

}  // namespace regret_miner
