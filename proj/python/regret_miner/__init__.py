# Copyright 2026 The regret_miner Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for regret_miner.

Structured records are returned as decoded JSON documents (dicts).
"""

import json

from ._core import (
    RegretMinerError,
    __version__,
    calibration_pair,
    canonical_regret,
    config_hash,
    generalized_regret,
    kde_window_mass,
    mine_top_quantile,
    quantile_count,
    replay_error,
    softmax_likelihoods,
)
from . import _core


def default_config():
    return json.loads(_core.default_config_json())


def generate_nav_dataset(n, epsilon_sigma=0.05, seed=0):
    return json.loads(_core.generate_nav_dataset_json(n, epsilon_sigma, seed))["samples"]


def run_scenario(family, index=0, seed=1, predictor=None, salt=0):
    """Runs one generated scenario and returns its scene/1 record as a dict.

    Without a predictor the ground-truth oracle drives the planner.
    """
    pred = "" if predictor is None else json.dumps(predictor)
    return json.loads(_core.run_scenario_json(family, index, seed, pred, salt))


def score_scene(scene, aggregation="mean"):
    text = scene if isinstance(scene, str) else json.dumps(scene)
    return json.loads(_core.score_scene_json(text, aggregation))


__all__ = [
    "RegretMinerError",
    "__version__",
    "calibration_pair",
    "canonical_regret",
    "config_hash",
    "default_config",
    "generalized_regret",
    "generate_nav_dataset",
    "kde_window_mass",
    "mine_top_quantile",
    "quantile_count",
    "replay_error",
    "run_scenario",
    "score_scene",
    "softmax_likelihoods",
]
