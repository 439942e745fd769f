"""Post-processors that rewrite a black-box classifier's labels.

``igd`` targets rows likely to carry individual bias, ``roc`` rewrites the
uncertain band around 0.5 and ``eop`` randomizes labels per
(group, prediction) cell to equalize odds.
"""

from .eop import (
    EopState,
    eop_apply,
    eop_expected_rates,
    eop_fit,
    eop_problem,
    keyed_uniform,
    solve_eop_lp,
)
from .igd import ConstantDetector, IgdState, igd_apply, igd_fit
from .pipeline import (
    METHODS,
    Pipeline,
    fit_postprocessor,
    load_postprocessor,
    postprocessor_from_dict,
    postprocessor_to_dict,
    save_postprocessor,
)
from .roc import THETA_GRID, RocState, roc_apply, roc_decisions, roc_fit
from .tau import FitError, TauSelection, di_band, select_tau

__all__ = [
    "METHODS",
    "THETA_GRID",
    "ConstantDetector",
    "EopState",
    "FitError",
    "IgdState",
    "Pipeline",
    "RocState",
    "TauSelection",
    "di_band",
    "eop_apply",
    "eop_expected_rates",
    "eop_fit",
    "eop_problem",
    "fit_postprocessor",
    "igd_apply",
    "igd_fit",
    "keyed_uniform",
    "load_postprocessor",
    "postprocessor_from_dict",
    "postprocessor_to_dict",
    "roc_apply",
    "roc_decisions",
    "roc_fit",
    "save_postprocessor",
    "select_tau",
    "solve_eop_lp",
]
