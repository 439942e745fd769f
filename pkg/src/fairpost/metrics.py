"""Fairness and accuracy measures for classifiers and post-processed pipelines.

A *decision function* is any object with ``decide(X, d, index=None)``
returning 0/1 labels. Fitted models qualify (their decision is the
thresholded score) and so do post-processed pipelines. ``index`` carries
stable per-row identifiers for pipelines that randomize.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

__all__ = [
    "MetricsReport",
    "balanced_accuracy",
    "detector_ground_truth",
    "disparate_impact",
    "evaluate",
    "favorable_rates",
    "individual_bias_indicator",
    "individual_bias_score",
    "individual_bias_summary",
]


def _binary(name, v):
    v = np.asarray(v)
    if v.ndim != 1:
        raise ValueError(f"{name} must be a vector")
    if v.size and not np.all((v == 0) | (v == 1)):
        raise ValueError(f"{name} must contain only 0 and 1")
    return v.astype(np.int64)


def favorable_rates(decisions, protected):
    """Favorable counts and group sizes as ``(fav0, n0, fav1, n1)``."""
    y = _binary("decisions", decisions)
    d = _binary("protected", protected)
    if y.shape != d.shape:
        raise ValueError("decisions and protected differ in length")
    n1 = int(d.sum())
    n0 = d.size - n1
    if n0 == 0 or n1 == 0:
        raise ValueError("both protected groups must be present")
    fav1 = int(y[d == 1].sum())
    fav0 = int(y[d == 0].sum())
    return fav0, n0, fav1, n1


def disparate_impact(decisions, protected):
    """Unprivileged favorable rate divided by the privileged favorable rate.

    Returns ``None`` when the privileged rate is zero (the ratio is
    undefined); callers must treat that as a flag, not a number.
    """
    fav0, n0, fav1, n1 = favorable_rates(decisions, protected)
    if fav1 == 0:
        return None
    return (fav0 / n0) / (fav1 / n1)


def balanced_accuracy(truth, decisions) -> float:
    """Mean of true-positive and true-negative rates."""
    t = _binary("truth", truth)
    p = _binary("decisions", decisions)
    if t.shape != p.shape:
        raise ValueError("truth and decisions differ in length")
    pos = t == 1
    if pos.all() or not pos.any():
        raise ValueError("balanced accuracy needs both truth classes")
    tpr = np.mean(p[pos] == 1)
    tnr = np.mean(p[~pos] == 0)
    return float(0.5 * (tpr + tnr))


def individual_bias_score(model, X):
    """Soft individual bias: ``score(x, 1) - score(x, 0)`` per row."""
    return model.score(X, 1) - model.score(X, 0)


def individual_bias_indicator(f, X, index=None):
    """1 where the decision changes when only the protected value is flipped."""
    return (f.decide(X, 0, index) != f.decide(X, 1, index)).astype(np.int64)


def individual_bias_summary(f, X, protected=None, population="all", index=None) -> float:
    """Fraction of rows with individual bias.

    ``population="unprivileged"`` restricts the average to rows with
    ``protected == 0``; the default averages over every row.
    """
    X = np.atleast_2d(X)
    if X.shape[0] == 0:
        raise ValueError("individual bias summary of an empty set")
    b = individual_bias_indicator(f, X, index)
    if population == "all":
        return float(b.mean())
    if population == "unprivileged":
        if protected is None:
            raise ValueError("population='unprivileged' needs the protected vector")
        mask = np.asarray(protected) == 0
        if not mask.any():
            raise ValueError("no unprivileged rows")
        return float(b[mask].mean())
    raise ValueError(f"unknown population {population!r}")


def detector_ground_truth(model, test, epsilon, target="smallest"):
    """Reference bias labels for the unprivileged rows of ``test``.

    Runs the same threshold selection used to train the IGD detector, but
    on ``test`` itself with exact bias scores.
    """
    from .postprocess.tau import select_tau

    unpriv = test.protected == 0
    if not unpriv.any():
        raise ValueError("test set has no unprivileged rows")
    Xu = test.features[unpriv]
    result = select_tau(
        individual_bias_score(model, Xu),
        model.label(test.features, test.protected),
        model.label(Xu, 1),
        test.protected,
        epsilon,
        target=target,
    )
    return result.beta


@dataclass(frozen=True)
class MetricsReport:
    balanced_accuracy: float
    disparate_impact: float | None
    individual_bias: float
    n0: int
    n1: int
    favorable0: int
    favorable1: int

    @property
    def disparate_impact_defined(self) -> bool:
        return self.disparate_impact is not None

    def as_dict(self) -> dict:
        return asdict(self)


def evaluate(f, dataset, index=None, population="all") -> MetricsReport:
    """All three measures of decision function ``f`` on ``dataset``."""
    decisions = f.decide(dataset.features, dataset.protected, index)
    fav0, n0, fav1, n1 = favorable_rates(decisions, dataset.protected)
    return MetricsReport(
        balanced_accuracy(dataset.labels, decisions),
        disparate_impact(decisions, dataset.protected),
        individual_bias_summary(f, dataset.features, dataset.protected, population, index),
        n0, n1, fav0, fav1,
    )
