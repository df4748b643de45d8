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

#include "regret_miner/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <limits>
#include <map>
#include <memory>
#include <set>

#include "json.hpp"
#include "regret_miner/parallel.hpp"
#include "regret_miner/serialize.hpp"

namespace regret_miner {

using Json = nlohmann::ordered_json;

namespace {

// Stream ids under the scenario seed.
constexpr std::uint64_t kHoldoutStream = 77;
constexpr std::uint64_t kRandomPoolStream = 100;
constexpr std::uint64_t kPlannerSaltBase = 1000;

[[noreturn]] void Invalid(const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument, what);
}

// ---------------------------------------------------------------------------
// Config documents.

std::string_view SteerName(SteerProfile s) {
  switch (s) {
    case SteerProfile::kStraight:
      return "straight";
    case SteerProfile::kLaneChangeLeft:
      return "lane_change_left";
    case SteerProfile::kLaneChangeRight:
      return "lane_change_right";
  }
  return "straight";
}

SteerProfile ParseSteer(std::string_view name) {
  for (SteerProfile s : {SteerProfile::kStraight, SteerProfile::kLaneChangeLeft,
                         SteerProfile::kLaneChangeRight}) {
    if (SteerName(s) == name) return s;
  }
  Invalid("unknown steering profile '" + std::string(name) + "'");
}

// Reads optional keys from an object and rejects any it does not know.
class Reader {
 public:
  Reader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) Invalid(where_ + " must be an object");
  }
  // Call once every key has been read.
  void Done() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) Invalid("unknown config key '" + where_ + key + "'");
    }
  }

  template <typename T>
  void Opt(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_[key].get<T>();
    } catch (const Json::exception& e) {
      Invalid("config key '" + where_ + key + "': " + e.what());
    }
  }

  const Json* Child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_[key] : nullptr;
  }

 private:
  const Json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

Json PlannerToJson(const PlannerHandle& h) {
  Json steer = Json::array();
  for (SteerProfile s : h.steer_profiles) steer.push_back(SteerName(s));
  return Json{{"weights",
               Json{{"progress", h.weights.progress},
                    {"lane", h.weights.lane},
                    {"collision", h.weights.collision},
                    {"control", h.weights.control}}},
              {"accel_levels", h.accel_levels},
              {"steer_profiles", steer},
              {"two_stage", h.two_stage},
              {"include_maintain", h.include_maintain},
              {"horizon", h.horizon},
              {"dt", h.dt},
              {"accel_jitter", h.accel_jitter},
              {"max_heading", h.max_heading},
              {"lateral_gain", h.lateral_gain},
              {"heading_gain", h.heading_gain},
              {"max_turn", h.max_turn},
              {"steer_jitter", h.steer_jitter},
              {"n_modes_out", h.n_modes_out},
              {"anticipated_reward_offset", h.anticipated_reward_offset},
              {"bounds",
               Json{{"max_accel", h.bounds.max_accel},
                    {"max_turn_rate", h.bounds.max_turn_rate}}}};
}

void PlannerFromJson(const Json& j, PlannerHandle& h) {
  Reader r(j, "planner.");
  if (const Json* w = r.Child("weights")) {
    Reader rw(*w, "planner.weights.");
    rw.Opt("progress", h.weights.progress);
    rw.Opt("lane", h.weights.lane);
    rw.Opt("collision", h.weights.collision);
    rw.Opt("control", h.weights.control);
    rw.Done();
  }
  r.Opt("accel_levels", h.accel_levels);
  std::vector<std::string> steer;
  r.Opt("steer_profiles", steer);
  if (j.contains("steer_profiles")) {
    h.steer_profiles.clear();
    for (const std::string& s : steer) h.steer_profiles.push_back(ParseSteer(s));
  }
  r.Opt("two_stage", h.two_stage);
  r.Opt("include_maintain", h.include_maintain);
  r.Opt("horizon", h.horizon);
  r.Opt("dt", h.dt);
  r.Opt("accel_jitter", h.accel_jitter);
  r.Opt("max_heading", h.max_heading);
  r.Opt("lateral_gain", h.lateral_gain);
  r.Opt("heading_gain", h.heading_gain);
  r.Opt("max_turn", h.max_turn);
  r.Opt("steer_jitter", h.steer_jitter);
  r.Opt("n_modes_out", h.n_modes_out);
  r.Opt("anticipated_reward_offset", h.anticipated_reward_offset);
  if (const Json* b = r.Child("bounds")) {
    Reader rb(*b, "planner.bounds.");
    rb.Opt("max_accel", h.bounds.max_accel);
    rb.Opt("max_turn_rate", h.bounds.max_turn_rate);
    rb.Done();
  }
  r.Done();
}

Json ConfigDocument(const ExperimentConfig& c) {
  Json families = Json::array();
  for (const FamilyCount& f : c.families) {
    families.push_back(Json{{"family", FamilyName(f.family)}, {"count", f.count}});
  }
  const PredictorParams& p = c.predictor;
  return Json{
      {"families", families},
      {"scenario_seed", c.scenario_seed},
      {"horizon", c.horizon},
      {"replan_every", c.replan_every},
      {"seeds", c.seeds},
      {"regret", Json{{"p", c.p}, {"aggregation", AggregationName(c.aggregation)}}},
      {"holdout",
       Json{{"high_percent", c.holdout.high_percent},
            {"low_percent", c.holdout.low_percent}}},
      {"finetune", Json{{"size", c.finetune_size}, {"blend", c.finetune_blend}}},
      {"planner", PlannerToJson(c.planner)},
      {"predictor",
       Json{{"smoothing", p.smoothing},
            {"history_window", p.history_window},
            {"approach_radius", p.approach_radius},
            {"yield_radius", p.yield_radius},
            {"resume_speed", p.resume_speed},
            {"resume_accel", p.resume_accel},
            {"label_window", p.label_window}}},
      {"pretrain",
       Json{{"per_family", c.pretrain_per_family}, {"seed", c.pretrain_seed}}},
      {"output_dir", c.output_dir},
  };
}

std::string Timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void Shuffle(std::vector<std::string>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.Index(i)]);
  }
}

std::vector<SceneRecord> Select(std::span<const SceneRecord> scenes,
                                std::span<const std::string> ids) {
  std::map<std::string, const SceneRecord*> by_id;
  for (const SceneRecord& s : scenes) by_id[s.scenario_id] = &s;
  std::vector<SceneRecord> out;
  out.reserve(ids.size());
  for (const std::string& id : ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) Invalid("unknown scenario id '" + id + "'");
    out.push_back(*it->second);
  }
  return out;
}

// Per-scene ingredients of SplitMetrics.
struct SceneSummary {
  double cost = 0.0;
  int frames = 0;
  bool scored = false;
  double regret = 0.0;
  bool has_humans = false;
  double ade = 0.0;
  double fde = 0.0;
};

SceneSummary SummarizeScene(const SceneRecord& scene,
                            const RewardWeights& weights) {
  SceneSummary s;
  s.cost = scene.TotalCollisionCost();
  s.frames = scene.CollisionFrames();
  if (scene.aborted || scene.replan_log.empty()) return s;
  s.scored = true;
  s.regret = ScoreScene(LuceShepardModel{weights}, scene, Aggregation::kMean)
                 .mean_regret;
  const AdeScore ade = AdeSceneScore(scene);
  s.has_humans = !ade.no_humans;
  s.ade = ade.score;
  s.fde = ade.fde;
  return s;
}

SplitMetrics Aggregate(std::span<const SceneSummary> scenes) {
  SplitMetrics m;
  if (scenes.empty()) return m;
  double cost = 0.0;
  int frames = 0;
  double regret = 0.0;
  int scored = 0;
  double ade = 0.0;
  double fde = 0.0;
  int with_humans = 0;
  for (const SceneSummary& s : scenes) {
    cost += s.cost;
    frames += s.frames;
    if (s.scored) {
      regret += s.regret;
      ++scored;
    }
    if (s.has_humans) {
      ade += s.ade;
      fde += s.fde;
      ++with_humans;
    }
  }
  m.collision_cost = cost / static_cast<double>(scenes.size());
  m.collision_severity = frames > 0 ? cost / frames : 0.0;
  m.mean_regret = scored > 0 ? regret / scored : 0.0;
  m.ade = with_humans > 0 ? ade / with_humans : 0.0;
  m.fde = with_humans > 0 ? fde / with_humans : 0.0;
  return m;
}

double MetricOf(const SplitMetrics& m, CaseMetric metric) {
  switch (metric) {
    case CaseMetric::kCollisionCost:
      return m.collision_cost;
    case CaseMetric::kCollisionSeverity:
      return m.collision_severity;
    case CaseMetric::kMeanRegret:
      return m.mean_regret;
    case CaseMetric::kAde:
      return m.ade;
    case CaseMetric::kFde:
      return m.fde;
  }
  return 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------

void ValidateConfig(const ExperimentConfig& c) {
  if (c.families.empty()) Invalid("config lists no scenario families");
  std::set<ScenarioFamily> seen;
  for (const FamilyCount& f : c.families) {
    if (f.count < 1) Invalid("family counts must be >= 1");
    if (!seen.insert(f.family).second) Invalid("family listed twice");
  }
  if (c.seeds.empty()) Invalid("config lists no seeds");
  if (std::set<std::uint64_t>(c.seeds.begin(), c.seeds.end()).size() !=
      c.seeds.size()) {
    Invalid("seeds must be distinct");
  }
  if (!(c.p > 0.0 && c.p < 100.0)) Invalid("p must lie in (0, 100)");
  for (double h : {c.holdout.high_percent, c.holdout.low_percent}) {
    if (!(h > 0.0 && h < 100.0)) Invalid("holdout percents must lie in (0, 100)");
  }
  if (c.finetune_size < 0) Invalid("finetune size must be >= 0");
  if (!(c.finetune_blend > 0.0 && c.finetune_blend <= 1.0)) {
    Invalid("finetune blend must lie in (0, 1]");
  }
  if (c.horizon < 1 || c.replan_every < 1) {
    Invalid("horizon and replan_every must be >= 1");
  }
  if (c.pretrain_per_family < 1) Invalid("pretrain per_family must be >= 1");
  ValidateHandle(c.planner);
  ValidateParams(c.predictor);
}

ExperimentConfig ConfigFromJson(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    Invalid(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  {
    Reader r(j, "");
    if (const Json* fams = r.Child("families")) {
      if (!fams->is_array()) Invalid("families must be a list");
      c.families.clear();
      for (const Json& f : *fams) {
        Reader rf(f, "families[].");
        std::string name;
        FamilyCount fc;
        rf.Opt("family", name);
        rf.Opt("count", fc.count);
        rf.Done();
        fc.family = ParseFamily(name);
        c.families.push_back(fc);
      }
    }
    r.Opt("scenario_seed", c.scenario_seed);
    r.Opt("horizon", c.horizon);
    r.Opt("replan_every", c.replan_every);
    r.Opt("seeds", c.seeds);
    if (const Json* g = r.Child("regret")) {
      Reader rg(*g, "regret.");
      rg.Opt("p", c.p);
      std::string agg(AggregationName(c.aggregation));
      rg.Opt("aggregation", agg);
      c.aggregation = ParseAggregation(agg);
      rg.Done();
    }
    if (const Json* h = r.Child("holdout")) {
      Reader rh(*h, "holdout.");
      rh.Opt("high_percent", c.holdout.high_percent);
      rh.Opt("low_percent", c.holdout.low_percent);
      rh.Done();
    }
    if (const Json* f = r.Child("finetune")) {
      Reader rf(*f, "finetune.");
      rf.Opt("size", c.finetune_size);
      rf.Opt("blend", c.finetune_blend);
      rf.Done();
    }
    if (const Json* p = r.Child("planner")) PlannerFromJson(*p, c.planner);
    if (const Json* p = r.Child("predictor")) {
      Reader rp(*p, "predictor.");
      rp.Opt("smoothing", c.predictor.smoothing);
      rp.Opt("history_window", c.predictor.history_window);
      rp.Opt("approach_radius", c.predictor.approach_radius);
      rp.Opt("yield_radius", c.predictor.yield_radius);
      rp.Opt("resume_speed", c.predictor.resume_speed);
      rp.Opt("resume_accel", c.predictor.resume_accel);
      rp.Opt("label_window", c.predictor.label_window);
      rp.Done();
    }
    if (const Json* p = r.Child("pretrain")) {
      Reader rp(*p, "pretrain.");
      rp.Opt("per_family", c.pretrain_per_family);
      rp.Opt("seed", c.pretrain_seed);
      rp.Done();
    }
    r.Opt("output_dir", c.output_dir);
    r.Done();
  }
  ValidateConfig(c);
  return c;
}

std::string ConfigToJson(const ExperimentConfig& config) {
  return ConfigDocument(config).dump(2);
}

std::string ConfigHash(const ExperimentConfig& config) {
  Json doc = ConfigDocument(config);
  doc.erase("output_dir");
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(HashString(doc.dump())));
  return buf;
}

std::vector<ScenarioSpec> DeploymentSpecs(const ExperimentConfig& config) {
  ValidateConfig(config);
  std::vector<ScenarioSpec> specs;
  for (const FamilyCount& f : config.families) {
    for (ScenarioSpec& s : GenerateScenarioBatch(
             f.family, f.count, config.scenario_seed, {config.horizon, false})) {
      specs.push_back(std::move(s));
    }
  }
  return specs;
}

std::vector<SceneRecord> RunScenes(std::span<const ScenarioSpec> specs,
                                   const PlannerHandle& planner,
                                   const Predictor& predictor, int replan_every,
                                   std::uint64_t planner_salt) {
  return ParallelMap<SceneRecord>(specs.size(), [&](std::size_t i) {
    return RunClosedLoop(specs[i], planner, predictor, replan_every,
                         planner_salt);
  });
}

PredictorParams PretrainBase(const ExperimentConfig& config) {
  ValidateConfig(config);
  std::vector<ScenarioSpec> specs;
  for (const FamilyCount& f : config.families) {
    for (ScenarioSpec& s :
         GenerateScenarioBatch(f.family, config.pretrain_per_family,
                               config.pretrain_seed, {config.horizon, true})) {
      specs.push_back(std::move(s));
    }
  }
  const OraclePredictor oracle(config.predictor);
  const std::vector<SceneRecord> logs =
      RunScenes(specs, config.planner, oracle, config.replan_every);
  return Fit(logs, config.predictor, {FitOptions::Kind::kFull, 1.0});
}

Deployment Deploy(const ExperimentConfig& config) {
  Deployment d;
  d.config = config;
  d.specs = DeploymentSpecs(config);
  d.base = PretrainBase(config);
  const LearnedPredictor learned(d.base);
  d.scenes = RunScenes(d.specs, config.planner, learned, config.replan_every);
  return d;
}

void WriteDeployment(const Deployment& d, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create '" + dir + "': " + ec.message());
  const std::filesystem::path root(dir);
  WriteFile((root / "config.json").string(), ConfigToJson(d.config) + "\n");
  WriteFile((root / "base_predictor.json").string(), PredictorToJson(d.base) + "\n");
  WriteScenesJsonl((root / "scenes.jsonl").string(), d.scenes);
  int aborted = 0;
  for (const SceneRecord& s : d.scenes) aborted += s.aborted ? 1 : 0;
  const Json manifest{
      {"schema", "manifest/1"},
      {"config_hash", ConfigHash(d.config)},
      {"created_at", Timestamp()},
      {"n_scenes", d.scenes.size()},
      {"n_aborted", aborted},
      {"files",
       Json{{"config", "config.json"},
            {"base_predictor", "base_predictor.json"},
            {"scenes", "scenes.jsonl"}}}};
  WriteFile((root / "manifest.json").string(), manifest.dump(2) + "\n");
}

Deployment ReadDeployment(const std::string& dir) {
  const std::filesystem::path root(dir);
  Deployment d;
  d.config = ConfigFromJson(ReadFile((root / "config.json").string()));
  Json manifest;
  try {
    manifest = Json::parse(ReadFile((root / "manifest.json").string()));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kSchema, std::string("manifest: ") + e.what());
  }
  if (!manifest.contains("config_hash") ||
      manifest["config_hash"] != ConfigHash(d.config)) {
    throw Error(ErrorCode::kSchema,
                "manifest config hash does not match config.json");
  }
  d.base = PredictorFromJson(ReadFile((root / "base_predictor.json").string()));
  d.specs = DeploymentSpecs(d.config);
  d.scenes = ReadScenesJsonl((root / "scenes.jsonl").string());
  return d;
}

std::vector<RegretReport> ScoreScenes(std::span<const SceneRecord> scenes,
                                      const LikelihoodModel& model,
                                      Aggregation aggregation) {
  // Aborted scenes carry no complete candidate log and are left out.
  std::vector<const SceneRecord*> live;
  for (const SceneRecord& s : scenes) {
    if (!s.aborted) live.push_back(&s);
  }
  return ParallelMap<RegretReport>(live.size(), [&](std::size_t i) {
    return ScoreScene(model, *live[i], aggregation);
  });
}

std::vector<ScoredId> ScoresOf(std::span<const RegretReport> reports) {
  std::vector<ScoredId> out;
  out.reserve(reports.size());
  for (const RegretReport& r : reports) out.push_back({r.scenario_id, r.score()});
  return out;
}

std::vector<std::string> SampleWithoutReplacement(
    std::span<const std::string> pool, std::size_t n, const RngStream& stream) {
  if (n > pool.size()) {
    Invalid("cannot draw " + std::to_string(n) + " ids from a pool of " +
            std::to_string(pool.size()));
  }
  std::vector<std::string> v(pool.begin(), pool.end());
  Rng rng(stream);
  Shuffle(v, rng);
  v.resize(n);
  return v;
}

Subsets BuildSubsets(std::span<const ScoredId> scores, double p,
                     const HoldoutRule& rule, int finetune_size,
                     const RngStream& stream) {
  std::map<std::string, double> score_of;
  for (const ScoredId& s : scores) {
    if (!score_of.emplace(s.scenario_id, s.score).second) {
      Invalid("duplicate scenario id '" + s.scenario_id + "'");
    }
  }
  Subsets out;
  out.high = MineTopQuantile(scores, p);
  const std::set<std::string> high_set(out.high.begin(), out.high.end());
  std::vector<std::string> hi = out.high;
  std::vector<std::string> lo;
  for (const ScoredId& s : scores) {
    if (!high_set.count(s.scenario_id)) lo.push_back(s.scenario_id);
  }
  Rng rng(stream);
  Shuffle(hi, rng);
  Shuffle(lo, rng);
  const auto nh = static_cast<std::size_t>(QuantileCount(hi.size(), rule.high_percent));
  const auto nl = static_cast<std::size_t>(QuantileCount(lo.size(), rule.low_percent));
  out.holdout_high.assign(hi.begin(), hi.begin() + static_cast<std::ptrdiff_t>(nh));
  out.pool_high.assign(hi.begin() + static_cast<std::ptrdiff_t>(nh), hi.end());
  out.holdout_low.assign(lo.begin(), lo.begin() + static_cast<std::ptrdiff_t>(nl));
  std::vector<std::string> rest(lo.begin() + static_cast<std::ptrdiff_t>(nl), lo.end());
  std::sort(rest.begin(), rest.end(), [&](const std::string& a, const std::string& b) {
    const double sa = score_of[a];
    const double sb = score_of[b];
    return sa != sb ? sa < sb : a < b;
  });
  const std::size_t size = finetune_size > 0
                               ? static_cast<std::size_t>(finetune_size)
                               : out.pool_high.size();
  if (out.pool_high.empty()) Invalid("no high-regret scenes left after holdout");
  if (size > rest.size()) {
    Invalid("low-regret pool has " + std::to_string(rest.size()) +
            " scenes, fewer than the requested " + std::to_string(size));
  }
  out.pool_low.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(size));
  out.pool_all = out.pool_high;
  out.pool_all.insert(out.pool_all.end(), rest.begin(), rest.end());
  out.pool_random = SampleWithoutReplacement(out.pool_all, size, stream.Derive(1));
  return out;
}

Subsets SubsetsFor(const ExperimentConfig& config,
                   std::span<const ScoredId> scores) {
  return BuildSubsets(scores, config.p, config.holdout, config.finetune_size,
                      RngStream{config.scenario_seed, kHoldoutStream});
}

std::string SubsetsToJson(const Subsets& s) {
  return Json{{"schema", "subsets/1"},
              {"high", s.high},
              {"holdout_high", s.holdout_high},
              {"holdout_low", s.holdout_low},
              {"pool_high", s.pool_high},
              {"pool_low", s.pool_low},
              {"pool_random", s.pool_random},
              {"pool_all", s.pool_all}}
      .dump(2);
}

// ---------------------------------------------------------------------------

std::string_view ArmName(Arm arm) {
  switch (arm) {
    case Arm::kBase:
      return "base";
    case Arm::kLowRegretFT:
      return "low";
    case Arm::kRandomFT:
      return "random";
    case Arm::kHighRegretFT:
      return "high";
    case Arm::kAllFT:
      return "all";
  }
  return "base";
}

Arm ParseArm(std::string_view name) {
  for (Arm a : kAllArms) {
    if (ArmName(a) == name) return a;
  }
  Invalid("unknown arm '" + std::string(name) + "'");
}

std::string_view ArmLabel(Arm arm) {
  switch (arm) {
    case Arm::kBase:
      return "Base";
    case Arm::kLowRegretFT:
      return "Low-Regret FT";
    case Arm::kRandomFT:
      return "Random FT";
    case Arm::kHighRegretFT:
      return "High-Regret FT";
    case Arm::kAllFT:
      return "All FT";
  }
  return "Base";
}

std::string_view SplitName(Split split) {
  return split == Split::kHighHoldout ? "high_holdout" : "low_holdout";
}

Split ParseSplit(std::string_view name) {
  for (Split s : kSplits) {
    if (SplitName(s) == name) return s;
  }
  Invalid("unknown split '" + std::string(name) + "'");
}

std::string_view CaseMetricName(CaseMetric metric) {
  switch (metric) {
    case CaseMetric::kCollisionCost:
      return "collision_cost";
    case CaseMetric::kCollisionSeverity:
      return "collision_severity";
    case CaseMetric::kMeanRegret:
      return "mean_regret";
    case CaseMetric::kAde:
      return "ade";
    case CaseMetric::kFde:
      return "fde";
  }
  return "collision_cost";
}

CaseMetric ParseCaseMetric(std::string_view name) {
  for (CaseMetric m : kCaseMetrics) {
    if (CaseMetricName(m) == name) return m;
  }
  Invalid("unknown case-study metric '" + std::string(name) + "'");
}

MetricStats Summarize(std::vector<double> per_seed) {
  MetricStats s;
  s.per_seed = std::move(per_seed);
  const auto n = static_cast<double>(s.per_seed.size());
  if (s.per_seed.empty()) return s;
  double sum = 0.0;
  for (double v : s.per_seed) sum += v;
  s.mean = sum / n;
  if (s.per_seed.size() > 1) {
    double sq = 0.0;
    for (double v : s.per_seed) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / (n - 1.0));
  }
  return s;
}

double Median(std::vector<double> values) {
  if (values.empty()) Invalid("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid]
                                : 0.5 * (values[mid - 1] + values[mid]);
}

const MetricStats& CaseStudyReport::At(Arm arm, Split split,
                                       CaseMetric metric) const {
  for (const ArmResult& a : arms) {
    if (a.arm == arm) {
      return a.cells[static_cast<std::size_t>(split)]
                    [static_cast<std::size_t>(metric)];
    }
  }
  Invalid("arm '" + std::string(ArmName(arm)) + "' not in the report");
}

SplitMetrics ComputeSplitMetrics(std::span<const SceneRecord> scenes,
                                 const RewardWeights& weights) {
  std::vector<SceneSummary> summaries;
  summaries.reserve(scenes.size());
  for (const SceneRecord& s : scenes) summaries.push_back(SummarizeScene(s, weights));
  return Aggregate(summaries);
}

std::uint64_t PlannerSalt(std::uint64_t seed) { return kPlannerSaltBase + seed; }

PredictorParams ArmPredictor(const ExperimentConfig& config, Arm arm,
                             std::uint64_t seed,
                             std::span<const SceneRecord> scenes,
                             const PredictorParams& base,
                             const Subsets& subsets) {
  std::vector<std::string> pool;
  switch (arm) {
    case Arm::kBase:
      return base;
    case Arm::kLowRegretFT:
      pool = subsets.pool_low;
      break;
    case Arm::kRandomFT:
      // Redrawn per seed from the experiment seed.
      pool = SampleWithoutReplacement(
          subsets.pool_all, subsets.pool_random.size(),
          RngStream{config.scenario_seed, kRandomPoolStream + seed});
      break;
    case Arm::kHighRegretFT:
      pool = subsets.pool_high;
      break;
    case Arm::kAllFT:
      pool = subsets.pool_all;
      break;
  }
  const std::vector<SceneRecord> data = Select(scenes, pool);
  return Fit(data, base, {FitOptions::Kind::kFinetune, config.finetune_blend});
}

CaseStudyReport FinetuneAndRedeploy(const ExperimentConfig& config,
                                    std::span<const ScenarioSpec> specs,
                                    std::span<const SceneRecord> scenes,
                                    const PredictorParams& base,
                                    const Subsets& subsets,
                                    std::span<const Arm> arms) {
  ValidateConfig(config);
  if (arms.empty()) Invalid("no arms requested");
  const std::set<std::string> held(
      [&] {
        std::set<std::string> h(subsets.holdout_high.begin(),
                                subsets.holdout_high.end());
        h.insert(subsets.holdout_low.begin(), subsets.holdout_low.end());
        return h;
      }());
  for (const auto* pool : {&subsets.pool_high, &subsets.pool_low,
                           &subsets.pool_random, &subsets.pool_all}) {
    for (const std::string& id : *pool) {
      if (held.count(id)) Invalid("holdout scene '" + id + "' found in a pool");
    }
  }

  std::map<std::string, const ScenarioSpec*> spec_of;
  for (const ScenarioSpec& s : specs) spec_of[s.scenario_id] = &s;
  std::array<std::vector<const ScenarioSpec*>, kSplits.size()> split_specs;
  for (Split split : kSplits) {
    const auto& ids = split == Split::kHighHoldout ? subsets.holdout_high
                                                   : subsets.holdout_low;
    for (const std::string& id : ids) {
      auto it = spec_of.find(id);
      if (it == spec_of.end()) Invalid("no spec for holdout '" + id + "'");
      split_specs[static_cast<std::size_t>(split)].push_back(it->second);
    }
  }

  const std::size_t n_seeds = config.seeds.size();
  std::vector<std::unique_ptr<LearnedPredictor>> predictors;
  for (Arm arm : arms) {
    for (std::uint64_t seed : config.seeds) {
      predictors.push_back(std::make_unique<LearnedPredictor>(
          ArmPredictor(config, arm, seed, scenes, base, subsets)));
    }
  }

  struct Job {
    std::size_t model = 0;  // arm * n_seeds + seed
    Split split = Split::kHighHoldout;
    const ScenarioSpec* spec = nullptr;
  };
  std::vector<Job> jobs;
  for (std::size_t m = 0; m < predictors.size(); ++m) {
    for (Split split : kSplits) {
      for (const ScenarioSpec* s : split_specs[static_cast<std::size_t>(split)]) {
        jobs.push_back({m, split, s});
      }
    }
  }
  const std::vector<SceneSummary> summaries =
      ParallelMap<SceneSummary>(jobs.size(), [&](std::size_t i) {
        const Job& job = jobs[i];
        const std::uint64_t seed = config.seeds[job.model % n_seeds];
        const SceneRecord rec =
            RunClosedLoop(*job.spec, config.planner, *predictors[job.model],
                          config.replan_every, PlannerSalt(seed));
        return SummarizeScene(rec, config.planner.weights);
      });

  // Metrics per (model, split), then per-seed lists per arm.
  std::vector<std::array<std::vector<SceneSummary>, kSplits.size()>> grouped(
      predictors.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    grouped[jobs[i].model][static_cast<std::size_t>(jobs[i].split)].push_back(
        summaries[i]);
  }
  CaseStudyReport report;
  report.seeds = config.seeds;
  for (std::size_t a = 0; a < arms.size(); ++a) {
    ArmResult result;
    result.arm = arms[a];
    for (Split split : kSplits) {
      std::vector<SplitMetrics> per_seed;
      for (std::size_t s = 0; s < n_seeds; ++s) {
        per_seed.push_back(
            Aggregate(grouped[a * n_seeds + s][static_cast<std::size_t>(split)]));
      }
      for (CaseMetric metric : kCaseMetrics) {
        std::vector<double> values;
        for (const SplitMetrics& m : per_seed) values.push_back(MetricOf(m, metric));
        result.cells[static_cast<std::size_t>(split)]
                    [static_cast<std::size_t>(metric)] = Summarize(std::move(values));
      }
    }
    report.arms.push_back(std::move(result));
  }
  return report;
}

// ---------------------------------------------------------------------------

Comparison CompareMetrics(std::span<const SceneRecord> scenes,
                          std::span<const MetricTag> metrics, double p,
                          const RewardWeights& weights, Aggregation aggregation) {
  if (metrics.empty()) Invalid("no metrics to compare");
  std::vector<const SceneRecord*> live;
  for (const SceneRecord& s : scenes) {
    if (!s.aborted) live.push_back(&s);
  }
  if (live.empty()) Invalid("no scenes to compare");
  Comparison out;
  for (MetricTag tag : metrics) {
    MetricLabeling lab;
    lab.tag = tag;
    lab.values = ParallelMap<double>(live.size(), [&](std::size_t i) {
      const SceneRecord& s = *live[i];
      switch (tag) {
        case MetricTag::kGrm:
          return ScoreScene(LuceShepardModel{weights}, s, aggregation).score();
        case MetricTag::kRm:
          return ScoreScene(LuceShepardModel{weights}, s, aggregation).canonical_mean;
        case MetricTag::kAde:
          return AdeSceneScore(s).score;
        case MetricTag::kTrfd:
          return TrfdFlag(s, p).flagged ? 1.0 : 0.0;
      }
      return 0.0;
    });
    std::vector<ScoredId> scored;
    for (std::size_t i = 0; i < live.size(); ++i) {
      lab.ids.push_back(live[i]->scenario_id);
      scored.push_back({live[i]->scenario_id, lab.values[i]});
    }
    if (tag == MetricTag::kTrfd) {
      for (const ScoredId& s : scored) {
        if (s.score > 0.5) lab.mined.push_back(s.scenario_id);
      }
    } else {
      lab.mined = MineTopQuantile(scored, p);
    }
    out.labelings.push_back(std::move(lab));
  }
  for (const MetricLabeling& a : out.labelings) {
    const std::set<std::string> sa(a.mined.begin(), a.mined.end());
    std::vector<double> row;
    for (const MetricLabeling& b : out.labelings) {
      const std::set<std::string> sb(b.mined.begin(), b.mined.end());
      row.push_back(sa.empty() ? std::numeric_limits<double>::quiet_NaN()
                               : Overlap(sa, sb));
    }
    out.overlap.push_back(std::move(row));
  }
  return out;
}

}  // namespace regret_miner
