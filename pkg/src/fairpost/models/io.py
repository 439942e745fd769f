"""JSON persistence for fitted classifiers."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .forest import DecisionTree, ForestModel
from .logistic import LogisticModel

MODEL_VERSION = 1

_TREE_FIELDS = ("feature", "threshold", "left", "right", "value", "n_samples")


def model_to_dict(model) -> dict:
    if isinstance(model, LogisticModel):
        # json writes floats with shortest round-trip repr, so weights are exact
        return {
            "version": MODEL_VERSION,
            "kind": "logistic",
            "weights": [float(w) for w in model.weights],
            "intercept": model.intercept,
            "l2_strength": model.l2_strength,
            "protected_input": model.protected_input,
            "n_iter": model.n_iter,
            "converged": model.converged,
        }
    if isinstance(model, ForestModel):
        return {
            "version": MODEL_VERSION,
            "kind": "forest",
            "n_inputs": model.n_inputs,
            "min_leaf": model.min_leaf,
            "seed": model.seed,
            "tree_seeds": list(model.tree_seeds),
            "trees": [
                {f: getattr(t, f).tolist() for f in _TREE_FIELDS} for t in model.trees
            ],
        }
    raise TypeError(f"cannot serialize {type(model).__name__}")


def model_from_dict(doc: dict):
    if doc.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model version {doc.get('version')}")
    kind = doc.get("kind")
    if kind == "logistic":
        return LogisticModel(
            np.array(doc["weights"], dtype=np.float64),
            doc["intercept"],
            doc["l2_strength"],
            doc["protected_input"],
            doc.get("n_iter", 0),
            doc.get("converged", True),
        )
    if kind == "forest":
        trees = tuple(
            DecisionTree(**{
                f: np.array(t[f], dtype=np.float64 if f in ("threshold", "value") else np.int64)
                for f in _TREE_FIELDS
            })
            for t in doc["trees"]
        )
        return ForestModel(trees, doc["n_inputs"], doc["min_leaf"], doc["seed"],
                           tuple(doc["tree_seeds"]))
    raise ValueError(f"unknown model kind {kind!r}")


def save_model(model, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model)) + "\n")


def load_model(path):
    return model_from_dict(json.loads(Path(path).read_text()))
