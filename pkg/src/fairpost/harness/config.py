"""Experiment configuration and its flat ``key = value`` file format."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from ..data import DATASETS
from ..postprocess import METHODS

__all__ = ["ConfigError", "ExperimentConfig", "read_config_file"]

CLASSIFIERS = ("logistic", "forest")
TAU_TARGETS = ("smallest", "center")
POPULATIONS = ("all", "unprivileged")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str
    protected: str
    classifier: str = "logistic"
    methods: tuple = METHODS
    n_splits: int = 25
    base_seed: int = 0
    epsilon: float = 0.2
    output_dir: str = "results"
    data_path: str = "data/raw"
    tau_target: str = "smallest"
    bias_population: str = "all"
    l2_strength: float = 1.0
    n_trees: int = 100
    min_leaf: int = 20

    def __post_init__(self):
        if self.dataset not in DATASETS:
            raise ConfigError(f"unknown dataset {self.dataset!r}")
        if self.protected not in DATASETS[self.dataset]:
            raise ConfigError(f"unknown protected attribute {self.protected!r} for {self.dataset}")
        if self.classifier not in CLASSIFIERS:
            raise ConfigError(f"classifier must be one of {CLASSIFIERS}")
        methods = tuple(self.methods)
        bad = [m for m in methods if m not in METHODS]
        if bad or not methods:
            raise ConfigError(f"methods must be a non-empty subset of {METHODS}")
        # canonical order keeps outputs stable whatever order was requested
        object.__setattr__(self, "methods", tuple(m for m in METHODS if m in methods))
        if self.n_splits < 1:
            raise ConfigError("n_splits must be at least 1")
        if self.base_seed < 0:
            raise ConfigError("base_seed must be non-negative")
        if not 0 < self.epsilon < 1:
            raise ConfigError("epsilon must lie in (0, 1)")
        if self.tau_target not in TAU_TARGETS:
            raise ConfigError(f"tau_target must be one of {TAU_TARGETS}")
        if self.bias_population not in POPULATIONS:
            raise ConfigError(f"bias_population must be one of {POPULATIONS}")

    @property
    def task(self) -> str:
        return f"{self.dataset}/{self.protected}"

    def seeds(self):
        return [self.base_seed + i for i in range(self.n_splits)]

    def as_dict(self) -> dict:
        doc = asdict(self)
        doc["methods"] = list(self.methods)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        doc = dict(doc)
        if "methods" in doc:
            doc["methods"] = tuple(doc["methods"])
        return cls(**doc)

    def with_(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)


_INT_KEYS = {"n_splits", "base_seed", "n_trees", "min_leaf"}
_FLOAT_KEYS = {"epsilon", "l2_strength"}
# flag spellings accepted in config files
_ALIASES = {"splits": "n_splits", "seed": "base_seed", "output": "output_dir", "data": "data_path"}


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment.

    Keys use either the field names or the CLI flag names (dashes or
    underscores). ``methods`` is a comma-separated list.
    """
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        key = _ALIASES.get(key, key)
        try:
            if key in _INT_KEYS:
                value = int(value)
            elif key in _FLOAT_KEYS:
                value = float(value)
            elif key == "methods":
                value = tuple(m.strip() for m in value.split(",") if m.strip())
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
        out[key] = value
    return out
