"""Equalized odds post-processing.

For every cell (group d, base label) a probability of emitting the
favorable label is chosen so that both groups end up with the same
expected true- and false-positive rates on validation, at minimum expected
0/1 loss. The feasible set is the unit box in four dimensions cut by two
equality constraints, so the optimum sits on a vertex with at least two
coordinates at a bound; those vertices are enumerated directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .tau import FitError

__all__ = [
    "EopState",
    "eop_apply",
    "eop_expected_rates",
    "eop_fit",
    "eop_problem",
    "keyed_uniform",
    "solve_eop_lp",
]

_FEAS_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class EopState:
    """``flip_probs[d, yhat]`` is P(final label = 1 | d, base label = yhat)."""

    flip_probs: np.ndarray
    seed: int
    cell_counts: np.ndarray  # [d, yhat, y] validation counts

    def __post_init__(self):
        p = np.array(self.flip_probs, dtype=np.float64).reshape(2, 2)
        if np.any(p < 0) or np.any(p > 1):
            raise ValueError("flip probabilities must lie in [0, 1]")
        p.setflags(write=False)
        object.__setattr__(self, "flip_probs", p)
        object.__setattr__(self, "cell_counts", np.asarray(self.cell_counts, dtype=np.int64))


def _group_rates(counts):
    """(TPR, FPR) per group from ``counts[d, yhat, y]``."""
    rates = np.empty((2, 2))
    for g in (0, 1):
        pos = counts[g, 0, 1] + counts[g, 1, 1]
        neg = counts[g, 0, 0] + counts[g, 1, 0]
        if pos == 0 or neg == 0:
            raise FitError(f"group {g} lacks one of the truth classes on validation")
        rates[g] = counts[g, 1, 1] / pos, counts[g, 1, 0] / neg
    return rates


def eop_problem(counts):
    """Equality matrix ``A p = 0`` and linear cost for ``p = (p00, p01, p10, p11)``.

    ``p_{d,yhat}`` is ordered by group then base label. The cost is the
    expected number of validation errors minus a constant.
    """
    counts = np.asarray(counts)
    rates = _group_rates(counts)
    (tpr0, fpr0), (tpr1, fpr1) = rates
    A = np.array([
        [1 - tpr0, tpr0, -(1 - tpr1), -tpr1],
        [1 - fpr0, fpr0, -(1 - fpr1), -fpr1],
    ])
    # errors in cell: n_pos * (1 - p) + n_neg * p
    cost = np.array([counts[g, yh, 0] - counts[g, yh, 1] for g in (0, 1) for yh in (0, 1)],
                    dtype=np.float64)
    return A, cost


def solve_eop_lp(A, cost):
    """Minimize ``cost @ p`` over the unit box subject to ``A p = 0``.

    Every assignment with each coordinate at 0, at 1 or free (at most two
    free) is tried; the free coordinates are solved from the equalities.
    Ties go to the first vertex in enumeration order.
    """
    best = None
    for pattern in itertools.product((0.0, 1.0, None), repeat=4):
        free = [i for i, v in enumerate(pattern) if v is None]
        if len(free) > 2:
            continue
        fixed = [i for i in range(4) if i not in free]
        p = np.array([0.0 if v is None else v for v in pattern])
        rhs = -A[:, fixed] @ p[fixed]
        if free:
            sol, *_ = np.linalg.lstsq(A[:, free], rhs, rcond=None)
            p[free] = sol
        if np.max(np.abs(A @ p)) > _FEAS_TOL:
            continue
        if np.any(p < -_FEAS_TOL) or np.any(p > 1 + _FEAS_TOL):
            continue
        p = np.clip(p, 0.0, 1.0)
        c = float(cost @ p)
        if best is None or c < best[0] - 1e-12:
            best = (c, p)
    if best is None:
        raise FitError("equalized-odds program has no feasible vertex")
    return best[1]


def eop_fit(base, validation, seed=0) -> EopState:
    """Fit flip probabilities using the validation ground-truth labels."""
    d = validation.protected
    y = validation.labels
    yhat = base.label(validation.features, d)
    counts = np.zeros((2, 2, 2), dtype=np.int64)
    np.add.at(counts, (d, yhat, y), 1)
    A, cost = eop_problem(counts)
    p = solve_eop_lp(A, cost)
    return EopState(p.reshape(2, 2), int(seed), counts)


def eop_expected_rates(state: EopState):
    """Expected post-processed (TPR, FPR) per group on the fitting set."""
    rates = _group_rates(state.cell_counts)
    out = np.empty((2, 2))
    for g in (0, 1):
        p0, p1 = state.flip_probs[g]
        tpr, fpr = rates[g]
        out[g] = p1 * tpr + p0 * (1 - tpr), p1 * fpr + p0 * (1 - fpr)
    return out


def keyed_uniform(seed, index, d):
    """One uniform draw in [0, 1) per row, keyed by (seed, row id, d)."""
    index = np.asarray(index, dtype=np.int64)
    d = np.broadcast_to(np.asarray(d, dtype=np.int64), index.shape)
    out = np.empty(index.shape, dtype=np.float64)
    for k, (i, dv) in enumerate(zip(index.tolist(), d.tolist())):
        word = np.random.SeedSequence([int(seed), i, dv]).generate_state(2, np.uint32)
        out[k] = ((int(word[0]) << 21) ^ (int(word[1]) >> 11)) / 2.0**53
    return out


def eop_apply(state: EopState, base, X, d, index=None):
    """Randomized labels; ``index`` identifies rows (defaults to positions)."""
    X = np.atleast_2d(X)
    n = X.shape[0]
    d = np.broadcast_to(np.asarray(d, dtype=np.int64), (n,))
    if index is None:
        index = np.arange(n)
    yhat = base.label(X, d)
    u = keyed_uniform(state.seed, index, d)
    return (u < state.flip_probs[d, yhat]).astype(np.int64)
