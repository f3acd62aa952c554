# Copyright 2026 The entropy-lens Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Entropy-based concept networks with first-order-logic explanations."""

import json

from . import _core
from ._core import (
    ConfigError,
    DataError,
    DimensionError,
    TrainingError,
    entropy,
    evaluate,
    load_csv,
    simplify,
    synth_parity,
    synth_toy,
)

__all__ = [
    "ConfigError",
    "DataError",
    "DimensionError",
    "TrainingError",
    "crossval",
    "entropy",
    "evaluate",
    "load_csv",
    "predict",
    "simplify",
    "synth_parity",
    "synth_toy",
    "train",
]


def crossval(preset="", config="", seed=None):
    """Cross-validate a preset or a TOML-style config text; returns the report dict."""
    return json.loads(_core.crossval_json(preset, config, seed))


def train(dataset, preset="", config="", seed=0):
    """Train one network on a dataset dict; returns the model artifact as a dict.

    The dict's "formulas" entry holds one ascii formula per class.
    """
    model = _core.train_json(
        dataset["concepts"],
        dataset["targets"],
        list(dataset.get("concept_names", [])),
        list(dataset.get("class_names", [])),
        preset,
        config,
        seed,
    )
    return json.loads(model)


def predict(model, concepts):
    """Sigmoid class scores (n x r) of a model dict or JSON string."""
    text = model if isinstance(model, str) else json.dumps(model)
    return _core.predict_json(text, concepts)
