"""Individual+group debiasing.

Unprivileged rows whose prediction would likely change under a flip of the
protected attribute receive the prediction they would get as privileged.
Which rows count as "likely" is learned by a detector trained on
unlabeled validation data.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..metrics import individual_bias_score
from ..models.logistic import LogisticModel, fit_logistic
from .tau import select_tau

log = logging.getLogger(__name__)

__all__ = ["ConstantDetector", "IgdState", "igd_apply", "igd_fit"]


@dataclass(frozen=True)
class ConstantDetector:
    """Stand-in detector when every auxiliary label is the same."""

    value: int

    def score(self, X, d=None):
        return np.full(np.atleast_2d(X).shape[0], float(self.value))

    def label(self, X, d=None):
        return np.full(np.atleast_2d(X).shape[0], self.value, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class IgdState:
    detector: LogisticModel | ConstantDetector
    tau: float
    flip_count_val: int
    epsilon: float
    constraint_met: bool = True
    validation_di: float = float("nan")
    warnings: tuple = ()


def balanced_weights(beta):
    """Per-row weights giving both auxiliary classes equal total weight."""
    beta = np.asarray(beta)
    frac = beta.mean()
    return np.where(beta == 1, 0.5 / frac, 0.5 / (1.0 - frac))


def igd_fit(base, validation, epsilon=0.2, l2_strength=1.0, target="smallest",
            balance_classes=True) -> IgdState:
    """Fit the bias detector on the unprivileged validation rows.

    Only ``validation.features`` and ``validation.protected`` are read; the
    ground-truth labels are never touched.

    Flagged rows are usually a few percent of the unprivileged group, and an
    unweighted fit then never crosses 0.5. ``balance_classes`` reweights the
    two auxiliary classes to equal mass before fitting.
    """
    X, d = validation.features, validation.protected
    unpriv = d == 0
    Xu = X[unpriv]
    sel = select_tau(
        individual_bias_score(base, Xu),
        base.label(X, d),
        base.label(Xu, 1),
        d,
        epsilon,
        target=target,
    )
    warnings = []
    if not sel.constraint_met:
        warnings.append(f"DI band not reachable on validation; best DI {sel.achieved_di:.4f}")
    if sel.beta.min() == sel.beta.max():
        value = int(sel.beta[0])
        detector = ConstantDetector(value)
        warnings.append(f"all auxiliary labels are {value}; detector is constant")
        if sel.k == 0:
            log.info("IGD: no flips needed on validation, identity post-processor")
    else:
        weights = balanced_weights(sel.beta) if balance_classes else None
        detector = fit_logistic(Xu, sel.beta, l2_strength, sample_weight=weights)
    for w in warnings:
        log.warning("IGD: %s", w)
    return IgdState(detector, sel.tau, sel.k, float(epsilon), sel.constraint_met,
                    sel.achieved_di, tuple(warnings))


def igd_apply(state: IgdState, base, X, d):
    """Post-processed labels.

    Privileged rows keep the base label. An unprivileged row flagged by the
    detector gets ``base.label(x, 1)``; otherwise it keeps ``base.label(x, 0)``.
    """
    X = np.atleast_2d(X)
    d = np.broadcast_to(np.asarray(d, dtype=np.int64), (X.shape[0],))
    out = base.label(X, 1)
    unpriv = d == 0
    if unpriv.any():
        Xu = X[unpriv]
        fires = state.detector.label(Xu) == 1
        out[unpriv] = np.where(fires, out[unpriv], base.label(Xu, 0))
    return out
