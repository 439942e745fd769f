"""Individual+group debiasing post-processing with ROC and EOP baselines."""

from .data import DataSplit, TabularDataset, load_dataset, split_dataset
from .metrics import (
    balanced_accuracy,
    detector_ground_truth,
    disparate_impact,
    evaluate,
    individual_bias_indicator,
    individual_bias_score,
    individual_bias_summary,
)
from .models import LogisticModel, ForestModel, train_forest, train_logistic
from .postprocess import Pipeline, fit_postprocessor, igd_apply, igd_fit, select_tau

__version__ = "0.1.0"

__all__ = [
    "DataSplit",
    "ForestModel",
    "LogisticModel",
    "Pipeline",
    "TabularDataset",
    "balanced_accuracy",
    "detector_ground_truth",
    "disparate_impact",
    "evaluate",
    "fit_postprocessor",
    "igd_apply",
    "igd_fit",
    "individual_bias_indicator",
    "individual_bias_score",
    "individual_bias_summary",
    "load_dataset",
    "select_tau",
    "split_dataset",
    "train_forest",
    "train_logistic",
]
