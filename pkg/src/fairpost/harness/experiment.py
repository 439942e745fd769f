"""Seeded split loop: train, post-process, evaluate, aggregate."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..data import DataError, load_dataset, read_prepared, split_dataset
from ..metrics import balanced_accuracy, detector_ground_truth, evaluate
from ..models import train_forest, train_logistic
from ..postprocess import FitError, fit_postprocessor
from ..postprocess.eop import eop_expected_rates
from .config import ExperimentConfig

log = logging.getLogger(__name__)

__all__ = [
    "METRICS",
    "ExperimentResult",
    "aggregate_records",
    "load_task_dataset",
    "run_experiment",
    "run_split",
]

METRICS = ("balanced_accuracy", "disparate_impact", "individual_bias",
           "detector_balanced_accuracy")


@dataclass
class ExperimentResult:
    config: dict
    records: list
    aggregates: list = field(default_factory=list)

    @property
    def task(self) -> str:
        return f"{self.config['dataset']}/{self.config['protected']}"

    @property
    def methods(self) -> list:
        return list(self.config["methods"])

    def aggregate(self, method: str) -> dict:
        for row in self.aggregates:
            if row["method"] == method:
                return row
        raise KeyError(method)

    def values(self, method: str, metric: str) -> list:
        """Per-split values of one metric in split order (``None`` kept)."""
        return [r[metric] for r in self.records if r["method"] == method]

    def as_dict(self) -> dict:
        return {"config": self.config, "records": self.records, "aggregates": self.aggregates}

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentResult":
        return cls(doc["config"], doc["records"], doc.get("aggregates") or [])


def load_task_dataset(config: ExperimentConfig):
    path = Path(config.data_path)
    if path.suffix == ".csv" and path.with_suffix(".json").is_file():
        ds = read_prepared(path)
        meta = ds.source_meta
        if (meta.get("dataset"), meta.get("protected_attr")) != (config.dataset, config.protected):
            raise DataError(f"{path} holds {meta.get('dataset')}/{meta.get('protected_attr')}, "
                            f"not {config.task}")
        return ds
    return load_dataset(config.dataset, config.protected, path)


def _train_base(config, train, seed):
    if config.classifier == "logistic":
        return train_logistic(train, config.l2_strength, seed)
    return train_forest(train, config.n_trees, config.min_leaf, seed)


def _num(x):
    return None if x is None else float(x)


def run_split(config: ExperimentConfig, dataset, split_no: int) -> list:
    """Records for every configured method on split ``split_no``."""
    seed = config.base_seed + split_no
    split = split_dataset(dataset, seed)
    train, val, test = (dataset.subset(i) for i in split)
    base_record = {"task": config.task, "split": split_no, "seed": seed}
    try:
        base = _train_base(config, train, seed)
    except ValueError as exc:
        return [dict(base_record, method=m, **{k: None for k in METRICS},
                     flags=[f"base training failed: {exc}"], diagnostics={})
                for m in config.methods]

    records = []
    for method in config.methods:
        rec = dict(base_record, method=method, **{k: None for k in METRICS})
        flags, diag = [], {}
        try:
            pipe = fit_postprocessor(method, base, val, config.epsilon, seed,
                                     config.tau_target, config.l2_strength)
        except (FitError, ValueError) as exc:
            rec.update(flags=[f"fit failed: {exc}"], diagnostics={})
            records.append(rec)
            continue

        report = evaluate(pipe, test, index=split.test_indices,
                          population=config.bias_population)
        rec["balanced_accuracy"] = report.balanced_accuracy
        rec["disparate_impact"] = _num(report.disparate_impact)
        rec["individual_bias"] = report.individual_bias
        if report.disparate_impact is None:
            flags.append("disparate impact undefined")

        state = pipe.state
        if method == "orig" and config.classifier == "logistic":
            diag.update(base_converged=base.converged, base_iterations=base.n_iter)
        elif method == "igd":
            diag.update(tau=state.tau, flip_count_val=state.flip_count_val,
                        constraint_met=state.constraint_met,
                        validation_di=state.validation_di)
            flags.extend(state.warnings)
            diag["privileged_unchanged"] = bool(np.array_equal(
                pipe.decide(test.features, 1), base.label(test.features, 1)))
            unpriv = test.protected == 0
            try:
                beta = detector_ground_truth(base, test, config.epsilon, config.tau_target)
                fired = state.detector.label(test.features[unpriv])
                rec["detector_balanced_accuracy"] = balanced_accuracy(beta, fired)
                diag["flip_count_test"] = int(beta.sum())
            except (FitError, ValueError) as exc:
                flags.append(f"detector accuracy undefined: {exc}")
        elif method == "roc":
            diag.update(theta=state.theta, validation_di=state.validation_di,
                        constraint_met=state.constraint_met)
            if not state.constraint_met:
                flags.append("ROC band not reachable on validation")
        elif method == "eop":
            rates = eop_expected_rates(state)
            diag.update(flip_probs=state.flip_probs.tolist(),
                        tpr_gap=float(abs(rates[0, 0] - rates[1, 0])),
                        fpr_gap=float(abs(rates[0, 1] - rates[1, 1])))
        rec["flags"] = flags
        rec["diagnostics"] = diag
        records.append(rec)
    return records


def _mean_std(values):
    n = len(values)
    if n == 0:
        return None, None
    mean = math.fsum(values) / n
    if n == 1:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var)


def aggregate_records(records, methods, n_splits) -> list:
    """Mean and sample standard deviation per method and metric.

    ``None`` values (undefined or failed) are excluded and the excluded
    split numbers are listed.
    """
    rows = []
    for method in methods:
        recs = [r for r in records if r["method"] == method]
        row = {"method": method, "n": len(recs), "excluded": {}, "note": ""}
        notes = []
        for metric in METRICS:
            present = [r for r in recs if r[metric] is not None]
            mean, std = _mean_std([r[metric] for r in present])
            row[metric] = mean
            row[f"{metric}_std"] = std
            row[f"{metric}_n"] = len(present)
            missing = [r["split"] for r in recs if r[metric] is None]
            applicable = not (metric == "detector_balanced_accuracy" and method != "igd")
            if missing and applicable:
                row["excluded"][metric] = missing
                notes.append(f"{metric} n={len(present)} (excluded splits "
                             f"{','.join(str(s) for s in missing)})")
        if len(recs) == 1:
            notes.append("n=1: std reported as 0")
        if len(recs) != n_splits:
            notes.append(f"{n_splits - len(recs)} split(s) missing")
        row["note"] = "; ".join(notes)
        rows.append(row)
    return rows


def _split_worker(args):
    config, split_no = args
    dataset = load_task_dataset(config)
    return run_split(config, dataset, split_no)


def run_experiment(config: ExperimentConfig, dataset=None, jobs: int = 1) -> ExperimentResult:
    """Run every split of ``config`` and aggregate.

    With ``jobs > 1`` splits run in worker processes; records are always
    assembled in split order so the output does not depend on ``jobs``.
    """
    if dataset is None:
        dataset = load_task_dataset(config)
    if jobs > 1 and config.n_splits > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_split_worker, [(config, i) for i in range(config.n_splits)]))
    else:
        chunks = [run_split(config, dataset, i) for i in range(config.n_splits)]
    records = [r for chunk in chunks for r in chunk]
    for r in records:
        for flag in r["flags"]:
            log.debug("%s split %d %s: %s", config.task, r["split"], r["method"], flag)
    aggs = aggregate_records(records, config.methods, config.n_splits)
    for a in aggs:
        if a["note"]:
            log.warning("%s %s: %s", config.task, a["method"], a["note"])
    return ExperimentResult(config.as_dict(), records, aggs)


def as_array(result: ExperimentResult, method: str, metric: str):
    return np.array([np.nan if v is None else v for v in result.values(method, metric)])
