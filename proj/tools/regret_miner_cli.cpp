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

// Command-line front end. Every subcommand prints one JSON document on
// stdout: a summary on success, {"error": {...}} with a nonzero exit code on
// failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "regret_miner/genplan.hpp"
#include "regret_miner/harness.hpp"
#include "regret_miner/report.hpp"
#include "regret_miner/serialize.hpp"

namespace rm = regret_miner;
using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string In(const std::string& dir, const char* name) {
  return (fs::path(dir) / name).string();
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t pos = s.find(',', start);
    const std::string item = s.substr(start, pos - start);
    if (!item.empty()) out.push_back(item);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::uint64_t> SeedList(int n) {
  if (n < 1) throw rm::Error(rm::ErrorCode::kInvalidArgument, "--seeds must be >= 1");
  std::vector<std::uint64_t> out;
  for (int i = 0; i < n; ++i) out.push_back(static_cast<std::uint64_t>(i));
  return out;
}

Json SplitMetricsJson(const rm::SplitMetrics& m) {
  return Json{{"collision_cost", m.collision_cost},
              {"collision_severity", m.collision_severity},
              {"mean_regret", m.mean_regret},
              {"ade", m.ade},
              {"fde", m.fde}};
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::string out;
};

Json Simulate(const SimulateArgs& a) {
  rm::ExperimentConfig config;
  if (!a.config.empty()) config = rm::ConfigFromJson(rm::ReadFile(a.config));
  const std::string dir = a.out.empty() ? config.output_dir : a.out;
  const rm::Deployment d = rm::Deploy(config);
  rm::WriteDeployment(d, dir);
  int aborted = 0;
  double cost = 0.0;
  for (const rm::SceneRecord& s : d.scenes) {
    aborted += s.aborted ? 1 : 0;
    cost += s.TotalCollisionCost();
  }
  return Json{{"dir", dir},
              {"config_hash", rm::ConfigHash(config)},
              {"scenes", d.scenes.size()},
              {"aborted", aborted},
              {"total_collision_cost", cost}};
}

struct ScoreArgs {
  std::string in;
  std::string model = "luce";
  std::string agg = "mean";
};

Json Score(const ScoreArgs& a) {
  const rm::Aggregation agg = rm::ParseAggregation(a.agg);
  if (a.model == "gen") {
    throw rm::Error(rm::ErrorCode::kInvalidArgument,
                    "the generative model scores nav deployments; use navregret");
  }
  if (a.model != "luce") {
    throw rm::Error(rm::ErrorCode::kInvalidArgument,
                    "unknown model '" + a.model + "'");
  }
  const rm::ExperimentConfig config =
      rm::ConfigFromJson(rm::ReadFile(In(a.in, "config.json")));
  const std::vector<rm::SceneRecord> scenes =
      rm::ReadScenesJsonl(In(a.in, "scenes.jsonl"));
  const std::vector<rm::RegretReport> reports =
      rm::ScoreScenes(scenes, rm::LuceShepardModel{config.planner.weights}, agg);
  rm::WriteRegretJsonl(In(a.in, "regret.jsonl"), reports);
  double sum = 0.0;
  for (const rm::RegretReport& r : reports) sum += r.score();
  return Json{{"scored", reports.size()},
              {"aggregation", a.agg},
              {"mean_score", reports.empty() ? 0.0 : sum / reports.size()},
              {"output", In(a.in, "regret.jsonl")}};
}

Json Mine(const std::string& in, double p) {
  const std::vector<rm::RegretReport> reports =
      rm::ReadRegretJsonl(In(in, "regret.jsonl"));
  if (reports.empty()) {
    throw rm::Error(rm::ErrorCode::kInvalidArgument, "regret.jsonl is empty");
  }
  const std::vector<rm::ScoredId> scores = rm::ScoresOf(reports);
  rm::MinedSet mined;
  mined.metric = "grm";
  mined.p = p;
  mined.aggregation = reports.front().aggregation;
  mined.flagged = rm::MineTopQuantile(scores, p);
  mined.k = static_cast<int>(mined.flagged.size());
  rm::WriteFile(In(in, "mined_grm.json"), rm::MinedToJson(mined) + "\n");
  return Json{{"k", mined.k}, {"n", scores.size()}, {"flagged", mined.flagged}};
}

Json Compare(const std::string& in, const std::string& metrics, double p) {
  const rm::ExperimentConfig config =
      rm::ConfigFromJson(rm::ReadFile(In(in, "config.json")));
  const std::vector<rm::SceneRecord> scenes =
      rm::ReadScenesJsonl(In(in, "scenes.jsonl"));
  std::vector<rm::MetricTag> tags;
  for (const std::string& m : SplitList(metrics)) tags.push_back(rm::ParseMetric(m));
  const rm::Comparison c = rm::CompareMetrics(scenes, tags, p,
                                              config.planner.weights,
                                              config.aggregation);
  rm::WriteFile(In(in, "overlap.csv"), rm::OverlapCsv(c));
  Json sizes = Json::object();
  for (const rm::MetricLabeling& l : c.labelings) {
    const std::string name(rm::MetricName(l.tag));
    rm::WriteFile(In(in, ("mined_" + name + ".json").c_str()),
                  rm::MinedToJson(rm::MinedSetOf(l, p, config.aggregation)) + "\n");
    sizes[name] = l.mined.size();
  }
  return Json{{"mined_sizes", sizes}, {"overlap", In(in, "overlap.csv")}};
}

struct FinetuneArgs {
  std::string in;
  std::string arms = "base,low,random,high,all";
  int seeds = 0;
};

Json Finetune(const FinetuneArgs& a) {
  rm::Deployment d = rm::ReadDeployment(a.in);
  if (a.seeds > 0) d.config.seeds = SeedList(a.seeds);
  std::vector<rm::Arm> arms;
  for (const std::string& s : SplitList(a.arms)) arms.push_back(rm::ParseArm(s));
  const std::vector<rm::RegretReport> reports = rm::ScoreScenes(
      d.scenes, rm::LuceShepardModel{d.config.planner.weights}, d.config.aggregation);
  const rm::Subsets subsets = rm::SubsetsFor(d.config, rm::ScoresOf(reports));
  rm::WriteFile(In(a.in, "subsets.json"), rm::SubsetsToJson(subsets) + "\n");

  const fs::path pred_dir = fs::path(a.in) / "predictors";
  fs::create_directories(pred_dir);
  for (rm::Arm arm : arms) {
    for (std::uint64_t seed : d.config.seeds) {
      const rm::PredictorParams p =
          rm::ArmPredictor(d.config, arm, seed, d.scenes, d.base, subsets);
      rm::WriteFile((pred_dir / (std::string(rm::ArmName(arm)) + "-seed" +
                                 std::to_string(seed) + ".json"))
                        .string(),
                    rm::PredictorToJson(p) + "\n");
    }
  }
  const rm::CaseStudyReport report =
      rm::FinetuneAndRedeploy(d.config, d.specs, d.scenes, d.base, subsets, arms);
  rm::WriteFile(In(a.in, "case_study.csv"), rm::CaseStudyCsv(report));
  Json summary = Json::object();
  for (const rm::ArmResult& r : report.arms) {
    Json cells = Json::object();
    for (rm::Split split : rm::kSplits) {
      cells[std::string(rm::SplitName(split))] =
          r.cells[static_cast<std::size_t>(split)]
                 [static_cast<std::size_t>(rm::CaseMetric::kCollisionCost)]
                     .mean;
    }
    summary[std::string(rm::ArmName(r.arm))] = cells;
  }
  return Json{{"holdout_high", subsets.holdout_high.size()},
              {"holdout_low", subsets.holdout_low.size()},
              {"pool_high", subsets.pool_high.size()},
              {"mean_collision_cost", summary},
              {"output", In(a.in, "case_study.csv")}};
}

struct RedeployArgs {
  std::string in;
  std::string predictor;
  std::string split = "high";
  std::uint64_t seed = 0;
  std::string out;
};

Json Redeploy(const RedeployArgs& a) {
  const rm::Deployment d = rm::ReadDeployment(a.in);
  const rm::PredictorParams params =
      a.predictor.empty() ? d.base : rm::PredictorFromJson(rm::ReadFile(a.predictor));
  std::vector<rm::ScenarioSpec> specs;
  if (a.split == "all") {
    specs = d.specs;
  } else {
    const std::vector<rm::RegretReport> reports = rm::ScoreScenes(
        d.scenes, rm::LuceShepardModel{d.config.planner.weights}, d.config.aggregation);
    const rm::Subsets subsets = rm::SubsetsFor(d.config, rm::ScoresOf(reports));
    const std::vector<std::string>* ids = nullptr;
    if (a.split == "high") {
      ids = &subsets.holdout_high;
    } else if (a.split == "low") {
      ids = &subsets.holdout_low;
    } else {
      throw rm::Error(rm::ErrorCode::kInvalidArgument,
                      "--split must be high, low or all");
    }
    for (const std::string& id : *ids) {
      for (const rm::ScenarioSpec& s : d.specs) {
        if (s.scenario_id == id) specs.push_back(s);
      }
    }
  }
  const rm::LearnedPredictor predictor(params);
  const std::vector<rm::SceneRecord> scenes =
      rm::RunScenes(specs, d.config.planner, predictor, d.config.replan_every,
                    rm::PlannerSalt(a.seed));
  const std::string out =
      a.out.empty() ? In(a.in, ("redeploy_" + a.split + ".jsonl").c_str()) : a.out;
  rm::WriteScenesJsonl(out, scenes);
  return Json{{"scenes", scenes.size()},
              {"metrics", SplitMetricsJson(rm::ComputeSplitMetrics(
                              scenes, d.config.planner.weights))},
              {"output", out}};
}

Json Report(const std::string& in, const std::string& formats, int bins) {
  Json written = Json::array();
  for (const std::string& f : SplitList(formats)) {
    switch (rm::ParseReportFormat(f)) {
      case rm::ReportFormat::kMarkdown: {
        const rm::CaseStudyReport r =
            rm::CaseStudyFromCsv(rm::ReadFile(In(in, "case_study.csv")));
        rm::WriteFile(In(in, "case_study.md"), rm::CaseStudyMarkdown(r));
        written.push_back(In(in, "case_study.md"));
        break;
      }
      case rm::ReportFormat::kCsv: {
        // Normalizes and validates the stored table.
        const rm::CaseStudyReport r =
            rm::CaseStudyFromCsv(rm::ReadFile(In(in, "case_study.csv")));
        rm::WriteFile(In(in, "case_study.csv"), rm::CaseStudyCsv(r));
        written.push_back(In(in, "case_study.csv"));
        break;
      }
      case rm::ReportFormat::kSvg: {
        const std::vector<rm::RegretReport> reports =
            rm::ReadRegretJsonl(In(in, "regret.jsonl"));
        const rm::MinedSet mined =
            rm::MinedFromJson(rm::ReadFile(In(in, "mined_grm.json")));
        std::vector<double> scores;
        double threshold = 1.0;
        for (const rm::RegretReport& r : reports) {
          scores.push_back(r.score());
          for (const std::string& id : mined.flagged) {
            if (id == r.scenario_id) threshold = std::min(threshold, r.score());
          }
        }
        rm::WriteFile(In(in, "regret_hist.svg"),
                      rm::RegretHistogramSvg(scores, threshold, bins));
        written.push_back(In(in, "regret_hist.svg"));
        break;
      }
    }
  }
  return Json{{"written", written}};
}

struct NavGenArgs {
  int n = 10000;
  double epsilon = 0.05;
  std::uint64_t seed = 0;
  std::string out = "nav.json";
  std::string codebook;
  int K = 6;
};

Json NavGen(const NavGenArgs& a) {
  const std::vector<rm::NavSample> data =
      rm::GenerateNavDataset(a.n, a.epsilon, rm::RngStream{a.seed, 0});
  rm::WriteFile(a.out, rm::NavDatasetToJson(data) + "\n");
  Json out{{"samples", data.size()}, {"output", a.out}};
  if (!a.codebook.empty()) {
    const rm::Codebook cb = rm::FitCodebook(data, a.K);
    rm::WriteFile(a.codebook, rm::CodebookToJson(cb) + "\n");
    out["codebook"] = a.codebook;
  }
  return out;
}

struct NavRegretArgs {
  std::string codebook;
  std::string fixture = "all";
  std::uint64_t seed = 0;
  int samples = 250;
  double delta = 0.1;
};

Json NavRegret(const NavRegretArgs& a) {
  rm::Codebook cb;
  if (a.codebook.empty()) {
    cb = rm::FitCodebook(rm::GenerateNavDataset(10000, 0.05, rm::RngStream{a.seed, 0}), 6);
  } else {
    cb = rm::CodebookFromJson(rm::ReadFile(a.codebook));
  }
  rm::KdeSettings kde;
  kde.n_samples = a.samples;
  kde.delta = a.delta;
  Json results = Json::array();
  for (rm::NavFixtureKind kind :
       {rm::NavFixtureKind::kNominal, rm::NavFixtureKind::kIrrelevant,
        rm::NavFixtureKind::kCollision}) {
    const std::string name(rm::NavFixtureName(kind));
    if (a.fixture != "all" && a.fixture != name) continue;
    const rm::NavDeployment dep =
        rm::RunNavFixture(cb, kind, kde, rm::RngStream{a.seed, 1});
    results.push_back(Json{{"fixture", name},
                           {"delta_h", dep.delta_h},
                           {"goal", rm::NavGoalName(dep.goal)},
                           {"regret", dep.regret}});
  }
  if (results.empty()) {
    throw rm::Error(rm::ErrorCode::kInvalidArgument,
                    "unknown fixture '" + a.fixture + "'");
  }
  return Json{{"results", results}};
}

Json PerceptionCase(std::uint64_t seed, int samples) {
  const std::vector<rm::PerceptionResult> results =
      rm::PerceptionCaseStudy(rm::SensorModel{}, samples, rm::RngStream{seed, 0});
  Json out = Json::array();
  for (const rm::PerceptionResult& r : results) {
    out.push_back(Json{{"deployment", r.tag},
                       {"obstacle", r.obstacle},
                       {"sensed", r.sensed},
                       {"regret", r.regret}});
  }
  return Json{{"results", out}};
}

int Fail(const std::string& code, const std::string& message) {
  std::cout << Json{{"error", Json{{"code", code}, {"message", message}}}}.dump()
            << std::endl;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop regret scoring and failure mining"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Pretrain the base predictor and deploy a batch");
  c_sim->add_option("--config", sim.config, "Experiment config (JSON)");
  c_sim->add_option("--out", sim.out, "Output directory (default: config output_dir)");

  ScoreArgs score;
  auto* c_score = app.add_subcommand("score", "Score every scene of a deployment");
  c_score->add_option("--in", score.in, "Deployment directory")->required();
  c_score->add_option("--model", score.model, "luce or gen");
  c_score->add_option("--agg", score.agg, "mean or worst");

  std::string mine_in;
  double mine_p = 20.0;
  auto* c_mine = app.add_subcommand("mine", "Mine the top p-quantile of scored scenes");
  c_mine->add_option("--in", mine_in, "Deployment directory")->required();
  c_mine->add_option("--p", mine_p, "Percent in (0, 100)");

  std::string cmp_in, cmp_metrics = "grm,rm,ade,trfd";
  double cmp_p = 20.0;
  auto* c_cmp = app.add_subcommand("compare", "Mine with several metrics and overlap the sets");
  c_cmp->add_option("--in", cmp_in, "Deployment directory")->required();
  c_cmp->add_option("--metrics", cmp_metrics, "Comma list of grm, rm, ade, trfd");
  c_cmp->add_option("--p", cmp_p, "Percent in (0, 100)");

  FinetuneArgs ft;
  auto* c_ft = app.add_subcommand("finetune", "Fine-tune per arm and seed, then redeploy holdouts");
  c_ft->add_option("--in", ft.in, "Deployment directory")->required();
  c_ft->add_option("--arms", ft.arms, "Comma list of base, low, random, high, all");
  c_ft->add_option("--seeds", ft.seeds, "Number of seeds (default: config)");

  RedeployArgs rd;
  auto* c_rd = app.add_subcommand("redeploy", "Redeploy holdout scenes with a given predictor");
  c_rd->add_option("--in", rd.in, "Deployment directory")->required();
  c_rd->add_option("--predictor", rd.predictor, "Predictor JSON (default: base)");
  c_rd->add_option("--split", rd.split, "high, low or all");
  c_rd->add_option("--seed", rd.seed, "Seed selecting the planner salt");
  c_rd->add_option("--out", rd.out, "Output JSONL");

  std::string rep_in, rep_formats = "md,csv,svg";
  int rep_bins = 20;
  auto* c_rep = app.add_subcommand("report", "Render tables and the regret histogram");
  c_rep->add_option("--in", rep_in, "Deployment directory")->required();
  c_rep->add_option("--format", rep_formats, "Comma list of md, csv, svg");
  c_rep->add_option("--bins", rep_bins, "Histogram bins");

  NavGenArgs ng;
  auto* c_ng = app.add_subcommand("navgen", "Generate the synthetic navigation dataset");
  c_ng->add_option("--n", ng.n, "Number of samples");
  c_ng->add_option("--epsilon", ng.epsilon, "Cue noise scale");
  c_ng->add_option("--seed", ng.seed, "Seed");
  c_ng->add_option("--out", ng.out, "Output dataset JSON");
  c_ng->add_option("--codebook", ng.codebook, "Also fit and write a codebook");
  c_ng->add_option("--K", ng.K, "Number of codes");

  NavRegretArgs nr;
  auto* c_nr = app.add_subcommand("navregret", "Generative regret of the navigation fixtures");
  c_nr->add_option("--codebook", nr.codebook, "Codebook JSON (default: fit one)");
  c_nr->add_option("--fixture", nr.fixture, "nominal, irrelevant, collision or all");
  c_nr->add_option("--seed", nr.seed, "Seed");
  c_nr->add_option("--samples", nr.samples, "KDE samples per code");
  c_nr->add_option("--delta", nr.delta, "KDE window half-width");

  std::uint64_t pc_seed = 0;
  int pc_samples = 200;
  auto* c_pc = app.add_subcommand("perception-case", "Sensor-fault regret case study");
  c_pc->add_option("--seed", pc_seed, "Seed");
  c_pc->add_option("--samples", pc_samples, "Demonstrations per sensed condition");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return Fail("usage", e.what());
  }

  try {
    Json out;
    if (*c_sim) out = Simulate(sim);
    else if (*c_score) out = Score(score);
    else if (*c_mine) out = Mine(mine_in, mine_p);
    else if (*c_cmp) out = Compare(cmp_in, cmp_metrics, cmp_p);
    else if (*c_ft) out = Finetune(ft);
    else if (*c_rd) out = Redeploy(rd);
    else if (*c_rep) out = Report(rep_in, rep_formats, rep_bins);
    else if (*c_ng) out = NavGen(ng);
    else if (*c_nr) out = NavRegret(nr);
    else if (*c_pc) out = PerceptionCase(pc_seed, pc_samples);
    std::cout << out.dump(2) << std::endl;
    return 0;
  } catch (const rm::Error& e) {
    return Fail(std::string(rm::ErrorCodeName(e.code())), e.what());
  } catch (const std::exception& e) {
    return Fail("internal", e.what());
  }
}
