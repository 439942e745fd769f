"""A base classifier plus an optional fitted post-processor."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..models.io import model_from_dict, model_to_dict
from .eop import EopState, eop_apply, eop_fit
from .igd import ConstantDetector, IgdState, igd_apply, igd_fit
from .roc import RocState, roc_apply, roc_fit

__all__ = [
    "METHODS",
    "Pipeline",
    "fit_postprocessor",
    "load_postprocessor",
    "postprocessor_from_dict",
    "postprocessor_to_dict",
    "save_postprocessor",
]

METHODS = ("orig", "eop", "roc", "igd")
SCHEMA_VERSION = 1


@dataclass(frozen=True, eq=False)
class Pipeline:
    """Decision function ``decide(X, d, index)`` for one method."""

    method: str
    base: object
    state: object = None

    def decide(self, X, d, index=None):
        if self.method == "orig":
            return self.base.label(X, d)
        if self.method == "igd":
            return igd_apply(self.state, self.base, X, d)
        if self.method == "roc":
            return roc_apply(self.state, self.base, X, d)
        if self.method == "eop":
            return eop_apply(self.state, self.base, X, d, index)
        raise ValueError(f"unknown method {self.method!r}")


def fit_postprocessor(method, base, validation, epsilon=0.2, seed=0,
                      target="smallest", l2_strength=1.0, balance_classes=True) -> Pipeline:
    if method == "orig":
        return Pipeline("orig", base)
    if method == "igd":
        return Pipeline("igd", base, igd_fit(base, validation, epsilon, l2_strength, target,
                                               balance_classes))
    if method == "roc":
        return Pipeline("roc", base, roc_fit(base, validation, epsilon))
    if method == "eop":
        return Pipeline("eop", base, eop_fit(base, validation, seed))
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def postprocessor_to_dict(pipeline: Pipeline) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "method": pipeline.method}
    s = pipeline.state
    if isinstance(s, IgdState):
        if isinstance(s.detector, ConstantDetector):
            detector = {"kind": "constant", "value": s.detector.value}
        else:
            detector = model_to_dict(s.detector)
        doc.update(tau=s.tau, flip_count_val=s.flip_count_val, epsilon=s.epsilon,
                   constraint_met=s.constraint_met, validation_di=s.validation_di,
                   warnings=list(s.warnings), detector=detector)
    elif isinstance(s, RocState):
        doc.update(theta=s.theta, epsilon=s.epsilon, validation_di=s.validation_di,
                   constraint_met=s.constraint_met)
    elif isinstance(s, EopState):
        doc.update(flip_probs=s.flip_probs.tolist(), seed=s.seed,
                   cell_counts=s.cell_counts.tolist())
    return doc


def postprocessor_from_dict(doc: dict, base) -> Pipeline:
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema version {doc.get('schema_version')}")
    method = doc["method"]
    if method == "orig":
        return Pipeline("orig", base)
    if method == "igd":
        det = doc["detector"]
        detector = ConstantDetector(det["value"]) if det["kind"] == "constant" else model_from_dict(det)
        state = IgdState(detector, doc["tau"], doc["flip_count_val"], doc["epsilon"],
                         doc["constraint_met"], doc["validation_di"], tuple(doc["warnings"]))
    elif method == "roc":
        state = RocState(doc["theta"], doc["epsilon"], doc["validation_di"], doc["constraint_met"])
    elif method == "eop":
        state = EopState(np.array(doc["flip_probs"]), doc["seed"], np.array(doc["cell_counts"]))
    else:
        raise ValueError(f"unknown method {method!r}")
    return Pipeline(method, base, state)


def save_postprocessor(pipeline: Pipeline, path) -> None:
    Path(path).write_text(json.dumps(postprocessor_to_dict(pipeline), indent=2) + "\n")


def load_postprocessor(path, base) -> Pipeline:
    return postprocessor_from_dict(json.loads(Path(path).read_text()), base)
