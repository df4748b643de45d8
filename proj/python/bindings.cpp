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

// Thin Python surface. Structured records cross the boundary as their JSON
// documents; the package wrapper decodes them.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "regret_miner/genplan.hpp"
#include "regret_miner/harness.hpp"
#include "regret_miner/regret.hpp"
#include "regret_miner/serialize.hpp"
#include "regret_miner/simkit.hpp"

namespace py = pybind11;
namespace rm = regret_miner;

namespace {

std::vector<std::string> Mine(const std::vector<std::pair<std::string, double>>& scores,
                              double p) {
  std::vector<rm::ScoredId> s;
  for (const auto& [id, v] : scores) s.push_back({id, v});
  return rm::MineTopQuantile(s, p);
}

std::string RunScenario(const std::string& family, int index, std::uint64_t seed,
                        const std::string& predictor_json, std::uint64_t salt) {
  const auto specs =
      rm::GenerateScenarioBatch(rm::ParseFamily(family), index + 1, seed);
  const rm::PlannerHandle planner;
  if (predictor_json.empty()) {
    const rm::OraclePredictor oracle;
    return rm::SceneToJson(rm::RunClosedLoop(specs.back(), planner, oracle, 10, salt));
  }
  const rm::LearnedPredictor learned(rm::PredictorFromJson(predictor_json));
  return rm::SceneToJson(rm::RunClosedLoop(specs.back(), planner, learned, 10, salt));
}

std::string ScoreScene(const std::string& scene_json, const std::string& agg) {
  const rm::SceneRecord scene = rm::SceneFromJson(scene_json);
  return rm::RegretToJson(rm::ScoreScene(rm::LuceShepardModel{scene.reward_weights},
                                         scene, rm::ParseAggregation(agg)));
}

double ReplayError(const std::string& scene_json) {
  const rm::SceneRecord scene = rm::SceneFromJson(scene_json);
  const std::vector<rm::JointState> replay = rm::ReplayScene(scene);
  double worst = 0.0;
  for (std::size_t k = 0; k < replay.size(); ++k) {
    const auto& a = replay[k];
    const auto& b = scene.states.at(k);
    worst = std::max({worst, std::abs(a.robot.x - b.robot.x),
                      std::abs(a.robot.y - b.robot.y)});
    for (std::size_t i = 0; i < a.humans.size(); ++i) {
      worst = std::max({worst, std::abs(a.humans[i].x - b.humans[i].x),
                        std::abs(a.humans[i].y - b.humans[i].y)});
    }
  }
  return worst;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Closed-loop regret scoring and failure mining";

  py::register_exception<rm::Error>(m, "RegretMinerError", PyExc_ValueError);

  m.def("softmax_likelihoods",
        [](const std::vector<double>& r) { return rm::SoftmaxLikelihoods(r); },
        py::arg("rewards"));
  m.def("generalized_regret",
        [](const std::vector<double>& p, int i) {
          return rm::GeneralizedRegretFromLikelihoods(p, i);
        },
        py::arg("likelihoods"), py::arg("executed_index"));
  m.def("canonical_regret",
        [](const std::vector<double>& r, int i) {
          return rm::CanonicalRegretFromRewards(r, i);
        },
        py::arg("rewards"), py::arg("executed_index"));
  m.def("quantile_count", &rm::QuantileCount, py::arg("n"), py::arg("p"));
  m.def("mine_top_quantile", &Mine, py::arg("scores"), py::arg("p"));
  m.def("kde_window_mass",
        [](const std::vector<double>& s, double h, double c, double d) {
          return rm::KdeWindowMass(s, h, c, d);
        },
        py::arg("samples"), py::arg("bandwidth"), py::arg("center"),
        py::arg("delta"));
  m.def("calibration_pair", [] {
    const rm::CalibrationPair pair = rm::BuildCalibrationPair();
    auto scene = [](const rm::CalibrationScene& s) {
      py::dict d;
      d["rewards"] = s.rewards;
      d["executed_index"] = s.executed_index;
      d["canonical"] = s.canonical;
      d["generalized"] = s.generalized;
      return d;
    };
    return py::make_tuple(scene(pair.a), scene(pair.b));
  });
  m.def("generate_nav_dataset_json",
        [](int n, double eps, std::uint64_t seed) {
          return rm::NavDatasetToJson(
              rm::GenerateNavDataset(n, eps, rm::RngStream{seed, 0}));
        },
        py::arg("n"), py::arg("epsilon_sigma"), py::arg("seed"));
  m.def("run_scenario_json", &RunScenario, py::arg("family"), py::arg("index"),
        py::arg("seed"), py::arg("predictor_json") = "", py::arg("salt") = 0,
        py::call_guard<py::gil_scoped_release>());
  m.def("score_scene_json", &ScoreScene, py::arg("scene_json"),
        py::arg("aggregation") = "mean");
  m.def("replay_error", &ReplayError, py::arg("scene_json"));
  m.def("config_hash",
        [](const std::string& text) {
          return rm::ConfigHash(rm::ConfigFromJson(text));
        },
        py::arg("config_json"));
  m.def("default_config_json",
        [] { return rm::ConfigToJson(rm::ExperimentConfig{}); });
#define REGRET_MINER_STR2(x) #x
#define REGRET_MINER_STR(x) REGRET_MINER_STR2(x)
  m.attr("__version__") = REGRET_MINER_STR(VERSION_INFO);
}
