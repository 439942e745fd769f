"""Loading, encoding and splitting of the three benchmark datasets.

Raw files are the upstream layouts:

* ``adult``  -- UCI ``adult.data`` and ``adult.test`` (comma separated, no
  header, ``?`` marks missing values). Both files are merged and every row
  with a missing value is dropped, leaving 45,222 rows.
* ``german`` -- UCI Statlog ``german.data`` (whitespace separated, 21 coded
  columns, last column 1 = good / 2 = bad credit risk). 1,000 rows.
* ``compas`` -- ProPublica ``compas-scores-two-years.csv``. Rows are kept when
  ``-30 <= days_b_screening_arrest <= 30``, ``is_recid != -1``,
  ``c_charge_degree != 'O'`` and ``score_text != 'N/A'``; rows whose kept
  columns contain a missing value (``c_charge_desc``) are then dropped,
  leaving 6,167 rows.

Protected attributes are binarized with 1 = privileged:

========  =========  ===============================================
dataset   attribute  privileged
========  =========  ===============================================
adult     sex        Male
adult     race       White
german    sex        personal_status in {A91, A93, A94} (male)
german    age        age > 25
compas    sex        Female
compas    race       Caucasian
========  =========  ===============================================

The protected attribute under study is removed from the feature matrix and
carried separately. The dataset's other protected attribute stays in the
features as a binarized 0/1 column.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

__all__ = [
    "DATASETS",
    "DataError",
    "DataSplit",
    "TabularDataset",
    "load_dataset",
    "read_prepared",
    "split_dataset",
    "write_prepared",
]

DATASETS = {
    "adult": ("sex", "race"),
    "german": ("sex", "age"),
    "compas": ("sex", "race"),
}

RAW_FILES = {
    "adult": ("adult.data", "adult.test"),
    "german": ("german.data",),
    "compas": ("compas-scores-two-years.csv",),
}

FAVORABLE = {
    "adult": "income >50K",
    "german": "good credit risk",
    "compas": "no recidivism within two years",
}

PRIVILEGED = {
    ("adult", "sex"): "Male",
    ("adult", "race"): "White",
    ("german", "sex"): "male (personal_status A91/A93/A94)",
    ("german", "age"): "age > 25",
    ("compas", "sex"): "Female",
    ("compas", "race"): "Caucasian",
}

PREPARED_VERSION = 1


class DataError(ValueError):
    """Raised for unknown dataset ids, bad raw files or degenerate data."""


@dataclass(frozen=True, eq=False)
class TabularDataset:
    """Encoded features, binary protected attribute and binary label.

    ``features`` never contains the protected attribute; it is carried in
    ``protected`` so it can be swapped for counterfactual scoring.
    """

    features: np.ndarray
    protected: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...]
    source_meta: dict = field(default_factory=dict)
    scaling: dict = field(default_factory=dict)

    def __post_init__(self):
        features = np.ascontiguousarray(self.features, dtype=np.float64)
        protected = np.asarray(self.protected, dtype=np.int64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if features.ndim != 2:
            raise DataError("features must be a 2-D matrix")
        n = features.shape[0]
        if protected.shape != (n,) or labels.shape != (n,):
            raise DataError("features, protected and labels differ in length")
        if len(self.feature_names) != features.shape[1]:
            raise DataError("feature_names does not match the feature width")
        if not np.all(np.isfinite(features)):
            raise DataError("features contain non-finite values")
        for name, arr in (("protected", protected), ("labels", labels)):
            if arr.size and not np.all((arr == 0) | (arr == 1)):
                raise DataError(f"{name} must contain only 0 and 1")
        for arr in (features, protected, labels):
            arr.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "protected", protected)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def name(self) -> str:
        return self.source_meta.get("dataset", "custom")

    @property
    def protected_attr(self) -> str:
        return self.source_meta.get("protected_attr", "d")

    def subset(self, indices) -> "TabularDataset":
        """Row view selected by ``indices`` (metadata is shared)."""
        idx = np.asarray(indices, dtype=np.int64)
        return TabularDataset(
            self.features[idx],
            self.protected[idx],
            self.labels[idx],
            self.feature_names,
            self.source_meta,
            self.scaling,
        )


@dataclass(frozen=True)
class DataSplit:
    train_indices: np.ndarray
    validation_indices: np.ndarray
    test_indices: np.ndarray
    seed: int

    def __iter__(self):
        return iter((self.train_indices, self.validation_indices, self.test_indices))


# ---------------------------------------------------------------------------
# raw readers

ADULT_COLUMNS = [
    "age", "workclass", "fnlwgt", "education", "education-num",
    "marital-status", "occupation", "relationship", "race", "sex",
    "capital-gain", "capital-loss", "hours-per-week", "native-country",
    "income-per-year",
]

GERMAN_COLUMNS = [
    "status", "month", "credit_history", "purpose", "credit_amount",
    "savings", "employment", "investment_as_income_percentage",
    "personal_status", "other_debtors", "residence_since", "property", "age",
    "installment_plans", "housing", "number_of_credits", "skill_level",
    "people_liable_for", "telephone", "foreign_worker", "credit",
]

COMPAS_KEEP = [
    "sex", "age", "age_cat", "race", "juv_fel_count", "juv_misd_count",
    "juv_other_count", "priors_count", "c_charge_degree", "c_charge_desc",
    "two_year_recid",
]


def _raw_paths(name: str, source_path) -> list[Path]:
    path = Path(source_path)
    wanted = RAW_FILES[name]
    if path.is_dir():
        paths = [path / f for f in wanted]
    else:
        paths = [path]
        # adult ships as two files; pick up the sibling when present
        if name == "adult" and path.name == "adult.data":
            sibling = path.with_name("adult.test")
            if sibling.exists():
                paths.append(sibling)
    for p in paths:
        if not p.is_file():
            raise DataError(f"raw file not found: {p}")
    return paths


def _read_adult(paths):
    frames = []
    for p in paths:
        skip = 1 if p.name.endswith(".test") else 0
        try:
            df = pd.read_csv(
                p, header=None, names=ADULT_COLUMNS, skiprows=skip,
                skipinitialspace=True, na_values=["?"], comment=None,
            )
        except (pd.errors.ParserError, UnicodeDecodeError) as exc:
            raise DataError(f"malformed adult file {p}: {exc}") from exc
        frames.append(df)
    df = pd.concat(frames, ignore_index=True)
    # adult.data ends with blank lines
    df = df.dropna(how="all")
    if df.shape[1] != len(ADULT_COLUMNS):
        raise DataError("adult file has the wrong number of columns")
    df = df.dropna().reset_index(drop=True)
    label = df.pop("income-per-year").astype(str).str.rstrip(".")
    df = df.drop(columns=["fnlwgt"])
    y = (label == ">50K").astype(np.int64).to_numpy()
    protected = {
        "sex": (df["sex"] == "Male").astype(np.int64).to_numpy(),
        "race": (df["race"] == "White").astype(np.int64).to_numpy(),
    }
    numeric = ["age", "education-num", "capital-gain", "capital-loss", "hours-per-week"]
    categorical = ["workclass", "education", "marital-status", "occupation",
                   "relationship", "native-country"]
    return df, y, protected, numeric, categorical


def _read_german(paths):
    try:
        df = pd.read_csv(paths[0], sep=r"\s+", header=None, names=GERMAN_COLUMNS)
    except (pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise DataError(f"malformed german file: {exc}") from exc
    if df.isna().any().any():
        raise DataError("german file has missing or extra fields")
    y = (df.pop("credit") == 1).astype(np.int64).to_numpy()
    protected = {
        "sex": df["personal_status"].isin(["A91", "A93", "A94"]).astype(np.int64).to_numpy(),
        "age": (df["age"] > 25).astype(np.int64).to_numpy(),
    }
    df = df.drop(columns=["personal_status"])
    numeric = ["month", "credit_amount", "investment_as_income_percentage",
               "residence_since", "age", "number_of_credits", "people_liable_for"]
    categorical = ["status", "credit_history", "purpose", "savings", "employment",
                   "other_debtors", "property", "installment_plans", "housing",
                   "skill_level", "telephone", "foreign_worker"]
    return df, y, protected, numeric, categorical


def _read_compas(paths):
    try:
        df = pd.read_csv(paths[0])
    except (pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise DataError(f"malformed compas file: {exc}") from exc
    needed = set(COMPAS_KEEP) | {"days_b_screening_arrest", "is_recid", "score_text"}
    missing = needed - set(df.columns)
    if missing:
        raise DataError(f"compas file lacks columns: {sorted(missing)}")
    keep = (
        (df["days_b_screening_arrest"] <= 30)
        & (df["days_b_screening_arrest"] >= -30)
        & (df["is_recid"] != -1)
        & (df["c_charge_degree"] != "O")
        & (df["score_text"] != "N/A")
    )
    df = df.loc[keep, COMPAS_KEEP].dropna().reset_index(drop=True)
    y = (df.pop("two_year_recid") == 0).astype(np.int64).to_numpy()
    protected = {
        "sex": (df["sex"] == "Female").astype(np.int64).to_numpy(),
        "race": (df["race"] == "Caucasian").astype(np.int64).to_numpy(),
    }
    numeric = ["age", "juv_fel_count", "juv_misd_count", "juv_other_count", "priors_count"]
    categorical = ["age_cat", "c_charge_degree", "c_charge_desc"]
    return df, y, protected, numeric, categorical


_READERS = {"adult": _read_adult, "german": _read_german, "compas": _read_compas}


def _encode(df, numeric, categorical, other_name, other_values):
    columns = []
    names = []
    scaling = {}
    for col in numeric:
        values = df[col].to_numpy(dtype=np.float64)
        mean = float(values.mean())
        std = float(values.std())
        if std > 0:
            values = (values - mean) / std
        else:
            mean, std = 0.0, 1.0
        scaling[col] = [mean, std]
        columns.append(values)
        names.append(col)
    for col in categorical:
        raw = df[col].astype(str)
        for level in sorted(raw.unique()):
            columns.append((raw == level).to_numpy(dtype=np.float64))
            names.append(f"{col}={level}")
    columns.append(other_values.astype(np.float64))
    names.append(other_name)
    return np.column_stack(columns), names, scaling


def load_dataset(name: str, protected_attr: str, source_path) -> TabularDataset:
    """Read a raw benchmark file and return the encoded dataset.

    Parameters
    ----------
    name : {"adult", "german", "compas"}
    protected_attr : str
        ``sex`` or ``race`` for adult and compas, ``sex`` or ``age`` for german.
    source_path : path-like
        The raw file, or a directory holding the upstream file name(s).
    """
    if name not in DATASETS:
        raise DataError(f"unknown dataset {name!r}; expected one of {sorted(DATASETS)}")
    if protected_attr not in DATASETS[name]:
        raise DataError(
            f"unknown protected attribute {protected_attr!r} for {name}; "
            f"expected one of {DATASETS[name]}"
        )
    paths = _raw_paths(name, source_path)
    df, y, protected, numeric, categorical = _READERS[name](paths)
    if len(df) == 0:
        raise DataError(f"{name}: no rows left after filtering")

    other = next(a for a in DATASETS[name] if a != protected_attr)
    d = protected[protected_attr]
    if d.min() == d.max():
        raise DataError(f"{name}/{protected_attr}: only one protected class present")
    # the studied attribute leaves the feature matrix entirely
    numeric = [c for c in numeric if c != protected_attr]
    categorical = [c for c in categorical if c != protected_attr]
    X, names, scaling = _encode(df, numeric, categorical, other, protected[other])
    meta = {
        "dataset": name,
        "protected_attr": protected_attr,
        "privileged": PRIVILEGED[(name, protected_attr)],
        "favorable": FAVORABLE[name],
        "n_rows": int(len(df)),
    }
    return TabularDataset(X, d, y, tuple(names), meta, scaling)


# ---------------------------------------------------------------------------
# prepared cache


def write_prepared(dataset: TabularDataset, path) -> tuple[Path, Path]:
    """Write the encoded dataset as CSV plus a JSON sidecar.

    Returns the two paths written. Floats are written with 17 significant
    digits so a read back is exact.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    cols = list(dataset.feature_names) + ["__protected__", "__label__"]
    frame = pd.DataFrame(dataset.features, columns=list(dataset.feature_names))
    frame["__protected__"] = dataset.protected
    frame["__label__"] = dataset.labels
    frame = frame[cols]
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    sidecar = path.with_suffix(".json")
    doc = {
        "version": PREPARED_VERSION,
        "columns": list(dataset.feature_names),
        "protected_column": "__protected__",
        "label_column": "__label__",
        "scaling": dataset.scaling,
        "source_meta": dataset.source_meta,
    }
    sidecar.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path, sidecar


def read_prepared(path) -> TabularDataset:
    """Inverse of :func:`write_prepared`."""
    path = Path(path)
    sidecar = path.with_suffix(".json")
    if not path.is_file() or not sidecar.is_file():
        raise DataError(f"prepared dataset or sidecar missing: {path}")
    doc = json.loads(sidecar.read_text())
    if doc.get("version") != PREPARED_VERSION:
        raise DataError(f"unsupported prepared-dataset version {doc.get('version')}")
    frame = pd.read_csv(path, float_precision="round_trip")
    columns = doc["columns"]
    if list(frame.columns) != columns + [doc["protected_column"], doc["label_column"]]:
        raise DataError("prepared CSV columns do not match the sidecar")
    return TabularDataset(
        frame[columns].to_numpy(dtype=np.float64),
        frame[doc["protected_column"]].to_numpy(),
        frame[doc["label_column"]].to_numpy(),
        tuple(columns),
        doc["source_meta"],
        doc["scaling"],
    )


# ---------------------------------------------------------------------------
# splitting


def split_sizes(n: int) -> tuple[int, int, int]:
    n_train = int(math.floor(0.6 * n + 0.5))
    n_val = int(math.floor(0.2 * n + 0.5))
    return n_train, n_val, n - n_train - n_val


def split_dataset(dataset, seed: int) -> DataSplit:
    """Random 60/20/20 train/validation/test partition driven only by ``seed``.

    ``dataset`` may be a :class:`TabularDataset` or a row count.
    """
    n = dataset if isinstance(dataset, (int, np.integer)) else len(dataset)
    if n < 10:
        raise DataError(f"need at least 10 rows to split, got {n}")
    if seed < 0:
        raise DataError("seed must be non-negative")
    perm = np.random.default_rng(seed).permutation(n)
    n_train, n_val, _ = split_sizes(n)
    return DataSplit(
        np.sort(perm[:n_train]),
        np.sort(perm[n_train:n_train + n_val]),
        np.sort(perm[n_train + n_val:]),
        int(seed),
    )
