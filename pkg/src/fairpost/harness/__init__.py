"""Experiment orchestration, reports and the ``fairpost`` command."""

from .config import ConfigError, ExperimentConfig, read_config_file
from .experiment import METRICS, ExperimentResult, aggregate_records, run_experiment, run_split
from .report import emit_report, load_results, results_to_csv

__all__ = [
    "METRICS",
    "ConfigError",
    "ExperimentConfig",
    "ExperimentResult",
    "aggregate_records",
    "emit_report",
    "load_results",
    "read_config_file",
    "results_to_csv",
    "run_experiment",
    "run_split",
]
