"""Reject option classification.

Inside the band ``|score - 0.5| < theta`` unprivileged rows get the
favorable label and privileged rows the unfavorable one. Outside the band
the base label stands.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..metrics import disparate_impact
from .tau import FitError, in_band

__all__ = ["THETA_GRID", "RocState", "roc_apply", "roc_decisions", "roc_fit"]

THETA_GRID = np.round(np.arange(1, 100) * 0.005, 3)


@dataclass(frozen=True)
class RocState:
    theta: float
    epsilon: float
    validation_di: float | None = None
    constraint_met: bool = True

    def __post_init__(self):
        if not 0 < self.theta < 0.5:
            raise ValueError("theta must lie in (0, 0.5)")


def roc_decisions(scores, d, theta):
    scores = np.asarray(scores, dtype=np.float64)
    d = np.broadcast_to(np.asarray(d, dtype=np.int64), scores.shape)
    band = np.abs(scores - 0.5) < theta
    return np.where(band, 1 - d, (scores >= 0.5).astype(np.int64))


def roc_fit(base, validation, epsilon=0.2, grid=THETA_GRID) -> RocState:
    """Smallest grid ``theta`` whose validation DI is in the band.

    If no grid point reaches the band, the one with DI closest to 1 is
    kept and ``constraint_met`` is false.
    """
    d = validation.protected
    scores = base.score(validation.features, d)
    dis = []
    for theta in grid:
        di = disparate_impact(roc_decisions(scores, d, theta), d)
        dis.append(np.nan if di is None else di)
    dis = np.array(dis)
    defined = ~np.isnan(dis)
    if not defined.any():
        raise FitError("disparate impact undefined for every theta")
    ok = defined & in_band(np.where(defined, dis, 0.0), epsilon)
    if ok.any():
        i = int(np.argmax(ok))
    else:
        i = int(np.argmin(np.where(defined, np.abs(dis - 1.0), np.inf)))
    return RocState(float(grid[i]), float(epsilon), float(dis[i]), bool(ok.any()))


def roc_apply(state: RocState, base, X, d):
    return roc_decisions(base.score(X, d), d, state.theta)
