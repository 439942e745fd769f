from pathlib import Path

import numpy as np
import pytest

from fairpost.data import TabularDataset

ROOT = Path(__file__).resolve().parents[1]
RAW_DIR = ROOT / "data" / "raw"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

ACCEPTANCE_LINES = []


def have_raw(*names):
    return all((RAW_DIR / n).is_file() for n in names)


requires_raw = pytest.mark.skipif(
    not have_raw("adult.data", "adult.test", "german.data", "compas-scores-two-years.csv"),
    reason="raw benchmark files not present; run scripts/fetch_data.py",
)


def make_synthetic(n=400, seed=0, p=3, bias=1.5, name="synthetic"):
    """Toy dataset whose labels depend on the features and on ``d``."""
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, p))
    d = (rng.random(n) < 0.6).astype(int)
    logit = X @ np.linspace(1.0, 0.2, p) + bias * (d - 0.5)
    y = (rng.random(n) < 1 / (1 + np.exp(-logit))).astype(int)
    names = tuple(f"x{i}" for i in range(p))
    meta = {"dataset": name, "protected_attr": "d", "n_rows": n}
    return TabularDataset(X, d, y, names, meta)


class TableModel:
    """Scores looked up by the integer in feature column 0 and by ``d``."""

    def __init__(self, table):
        self.table = np.asarray(table, dtype=float)

    def score(self, X, d):
        X = np.atleast_2d(X)
        ids = X[:, 0].astype(int)
        d = np.broadcast_to(np.asarray(d, dtype=int), ids.shape)
        return self.table[ids, d]

    def label(self, X, d):
        return (self.score(X, d) >= 0.5).astype(int)

    def decide(self, X, d, index=None):
        return self.label(X, d)


@pytest.fixture
def synthetic():
    return make_synthetic()


@pytest.fixture(scope="session")
def raw_dir():
    return RAW_DIR


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
