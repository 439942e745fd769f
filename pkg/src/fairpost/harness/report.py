"""CSV, JSON and SVG output for one or several experiment results."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .experiment import METRICS, ExperimentResult
from .svg import grouped_bar_chart

__all__ = [
    "CSV_COLUMNS",
    "FIGURES",
    "emit_report",
    "load_results",
    "results_to_csv",
]

SCHEMA_VERSION = 1

CSV_COLUMNS = ["row_type", "task", "split", "seed", "method"]
for _m in METRICS:
    CSV_COLUMNS += [_m, f"{_m}_std"]
CSV_COLUMNS += ["n", "note"]

# file name, metric, title, axis label, ideal value, methods shown
FIGURES = (
    ("fig_individual_bias.svg", "individual_bias", "Individual bias", "fraction of test rows", 0.0, None),
    ("fig_disparate_impact.svg", "disparate_impact", "Disparate impact", "DI", 1.0, None),
    ("fig_balanced_accuracy.svg", "balanced_accuracy", "Balanced accuracy", "balanced accuracy", 1.0, None),
    ("fig_detector_accuracy.svg", "detector_balanced_accuracy", "Bias detector balanced accuracy",
     "balanced accuracy", 1.0, ("igd",)),
)


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def results_to_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for res in results:
        for r in res.records:
            row = {"row_type": "split", "task": res.task, "split": r["split"], "seed": r["seed"],
                   "method": r["method"], "note": "; ".join(r.get("flags", []))}
            for m in METRICS:
                row[m] = r[m]
            w.writerow([_cell(row.get(c)) for c in CSV_COLUMNS])
        for a in res.aggregates:
            row = {"row_type": "aggregate", "task": res.task, "method": a["method"],
                   "n": a["n"], "note": a["note"]}
            for m in METRICS:
                row[m] = a[m]
                row[f"{m}_std"] = a[f"{m}_std"]
            w.writerow([_cell(row.get(c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def _figure(results, metric, title, ylabel, ideal, only):
    groups = [r.task for r in results]
    series = []
    for r in results:
        for m in r.methods:
            if m not in series and (only is None or m in only):
                series.append(m)
    means, stds = [], []
    for r in results:
        row_m, row_s = [], []
        for s in series:
            try:
                a = r.aggregate(s)
            except KeyError:
                a = {}
            row_m.append(a.get(metric))
            row_s.append(a.get(f"{metric}_std"))
        means.append(row_m)
        stds.append(row_s)
    return grouped_bar_chart(groups, series, means, stds, title, ylabel, ideal)


def emit_report(results, output_dir, formats=("csv", "json", "svg")) -> list:
    """Write ``result.csv``, ``result.json`` and the four figures.

    ``results`` is one :class:`ExperimentResult` or a list of them (one
    bar group per task in the figures). Returns the written paths.
    """
    if isinstance(results, ExperimentResult):
        results = [results]
    if not results or not any(r.records for r in results):
        raise ValueError("nothing to report")
    bad = set(formats) - {"csv", "json", "svg"}
    if bad:
        raise ValueError(f"unknown report formats: {sorted(bad)}")
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in formats:
        p = out / "result.csv"
        p.write_text(results_to_csv(results))
        written.append(p)
    if "json" in formats:
        p = out / "result.json"
        doc = {"schema_version": SCHEMA_VERSION, "results": [r.as_dict() for r in results]}
        p.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
        written.append(p)
    if "svg" in formats:
        for name, metric, title, ylabel, ideal, only in FIGURES:
            if only and not any(m in r.methods for r in results for m in only):
                continue
            p = out / name
            p.write_text(_figure(results, metric, title, ylabel, ideal, only))
            written.append(p)
    return written


def load_results(path) -> list:
    doc = json.loads(Path(path).read_text())
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported result schema {doc.get('schema_version')}")
    return [ExperimentResult.from_dict(r) for r in doc["results"]]
