"""Choice of the individual-bias threshold from the disparate impact band."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["FitError", "TauSelection", "di_band", "select_tau"]

# slack for DI values that land on a band edge up to rounding
BAND_SLACK = 1e-12


class FitError(RuntimeError):
    """A post-processor could not be fitted (e.g. DI undefined everywhere)."""


def di_band(epsilon):
    """Acceptable DI interval ``[1 - eps, 1 / (1 - eps)]``; eps = 1 accepts any DI."""
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    if epsilon == 1:
        return 0.0, np.inf
    return 1.0 - epsilon, 1.0 / (1.0 - epsilon)


def in_band(di, epsilon):
    lo, hi = di_band(epsilon)
    di = np.asarray(di, dtype=np.float64)
    return (di >= lo - BAND_SLACK) & (di <= hi + BAND_SLACK)


@dataclass(frozen=True, eq=False)
class TauSelection:
    tau: float
    beta: np.ndarray
    k: int
    di_path: np.ndarray
    constraint_met: bool

    @property
    def achieved_di(self) -> float:
        return float(self.di_path[self.k])

    def __iter__(self):
        return iter((self.tau, self.beta, self.k))


def select_tau(bias_scores, base_decisions, counterfactual_decisions, protected,
               epsilon, target="smallest") -> TauSelection:
    """Pick how many of the most-biased unprivileged rows to flip.

    Parameters
    ----------
    bias_scores : array of shape (m,)
        Soft bias scores of the unprivileged rows, in the order those rows
        appear in ``protected``.
    base_decisions : array of shape (n,)
        Base labels for every row at its actual protected value.
    counterfactual_decisions : array of shape (m,)
        Base labels of the unprivileged rows scored as privileged.
    protected : array of shape (n,)
    epsilon : float
        DI must land in ``[1 - epsilon, 1 / (1 - epsilon)]``.
    target : {"smallest", "center"}
        ``smallest`` takes the fewest flips that reach the band; ``center``
        takes the in-band count whose DI is closest to 1.

    Returns
    -------
    TauSelection
        ``beta`` marks the top-``k`` rows (descending score, ties by lower
        index) and ``tau`` sits midway between the k-th and (k+1)-th sorted
        scores. ``di_path[k]`` is the simulated DI after flipping ``k`` rows.
    """
    lo, hi = di_band(epsilon)
    scores = np.asarray(bias_scores, dtype=np.float64)
    base = np.asarray(base_decisions, dtype=np.int64)
    cf = np.asarray(counterfactual_decisions, dtype=np.int64)
    d = np.asarray(protected, dtype=np.int64)
    unpriv = d == 0
    m = int(unpriv.sum())
    if m == 0:
        raise FitError("no unprivileged rows")
    if scores.shape != (m,) or cf.shape != (m,) or base.shape != d.shape:
        raise ValueError("inconsistent vector lengths")
    n1 = int(d.size - m)
    fav1 = int(base[~unpriv].sum())
    if n1 == 0 or fav1 == 0:
        raise FitError("disparate impact undefined: privileged favorable rate is zero")

    order = np.lexsort((np.arange(m), -scores))
    base_u = base[unpriv]
    gain = cf[order] - base_u[order]
    fav0 = base_u.sum() + np.concatenate([[0], np.cumsum(gain)])
    di_path = (fav0 / m) / (fav1 / n1)

    ok = in_band(di_path, epsilon)
    met = bool(ok.any())
    if met:
        if target == "smallest":
            k = int(np.argmax(ok))
        elif target == "center":
            dist = np.where(ok, np.abs(di_path - 1.0), np.inf)
            k = int(np.argmin(dist))
        else:
            raise ValueError(f"unknown target {target!r}")
    else:
        below = di_path <= hi
        k = int(np.argmax(np.where(below, di_path, -np.inf))) if below.any() else int(np.argmin(di_path))

    beta = np.zeros(m, dtype=np.int64)
    beta[order[:k]] = 1
    s = scores[order]
    if k == 0:
        tau = float(s[0] + 1.0)
    elif k == m:
        tau = float(s[-1] - 1.0)
    else:
        tau = float(0.5 * (s[k - 1] + s[k]))
    return TauSelection(tau, beta, k, di_path, met)
