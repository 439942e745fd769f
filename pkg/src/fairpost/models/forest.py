"""Bagged Gini decision trees with a hard-vote score."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["DecisionTree", "ForestModel", "build_tree", "train_forest"]

LEAF = -1


@dataclass(frozen=True, eq=False)
class DecisionTree:
    """Array-encoded binary tree.

    Internal node ``i`` sends a row left when ``x[feature[i]] <= threshold[i]``.
    ``value`` is the favorable-class fraction of the training rows in a leaf
    and ``n_samples`` the number of (bootstrap) rows that reached the node.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_samples: np.ndarray

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.left == LEAF))

    def apply(self, Z):
        node = np.zeros(Z.shape[0], dtype=np.int64)
        rows = np.arange(Z.shape[0])
        active = self.left[node] != LEAF
        while active.any():
            r = rows[active]
            nd = node[r]
            go_left = Z[r, self.feature[nd]] <= self.threshold[nd]
            node[r] = np.where(go_left, self.left[nd], self.right[nd])
            active[r] = self.left[node[r]] != LEAF
        return node

    def vote(self, Z):
        # an exact 0.5 leaf votes favorable
        return (self.value[self.apply(Z)] >= 0.5).astype(np.int64)


def _best_split(Zn, yn, feats, min_leaf):
    """Best Gini split of one node over candidate columns ``feats``.

    Returns (weighted impurity, feature, threshold, n_nonconstant).
    """
    n = yn.size
    V = Zn[:, feats]
    order = np.argsort(V, axis=0, kind="stable")
    Vs = np.take_along_axis(V, order, axis=0)
    nonconstant = Vs[0] < Vs[-1]
    ones = np.cumsum(yn[order], axis=0)[:-1]
    total = yn.sum()
    n_left = np.arange(1, n, dtype=np.float64)[:, None]
    n_right = n - n_left
    ones_right = total - ones
    # n * weighted Gini, up to the constant factor 2
    impurity = ones * (n_left - ones) / n_left + ones_right * (n_right - ones_right) / n_right
    valid = Vs[:-1] < Vs[1:]
    valid[: min_leaf - 1] = False
    valid[n - min_leaf:] = False
    impurity = np.where(valid, impurity, np.inf)
    flat = int(np.argmin(impurity))
    i, j = divmod(flat, len(feats))
    best = impurity[i, j]
    if not np.isfinite(best):
        return np.inf, -1, 0.0, int(nonconstant.sum())
    threshold = 0.5 * (Vs[i, j] + Vs[i + 1, j])
    if not threshold < Vs[i + 1, j]:
        threshold = Vs[i, j]
    return best, int(feats[j]), float(threshold), int(nonconstant.sum())


def build_tree(Z, y, rng, min_leaf=20, max_features=None) -> DecisionTree:
    """Grow one CART classification tree on (Z, y).

    At each node columns are visited in random order in blocks of
    ``max_features``; the search stops once at least ``max_features``
    non-constant columns have been examined.
    """
    n, p = Z.shape
    if max_features is None:
        max_features = max(1, int(math.sqrt(p)))
    y = np.asarray(y, dtype=np.float64)
    feature, threshold, left, right, value, count = [], [], [], [], [], []

    def new_node(idx):
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(float(y[idx].mean()))
        count.append(idx.size)
        return len(feature) - 1

    stack = [(new_node(np.arange(n)), np.arange(n))]
    while stack:
        node, idx = stack.pop()
        m = idx.size
        yn = y[idx]
        pos = yn.sum()
        if m < 2 * min_leaf or pos == 0 or pos == m:
            continue
        parent = pos * (m - pos) / m
        Zn = Z[idx]
        order = rng.permutation(p)
        best = (np.inf, -1, 0.0)
        seen = 0
        for start in range(0, p, max_features):
            feats = order[start:start + max_features]
            imp, f, t, nc = _best_split(Zn, yn, feats, min_leaf)
            if imp < best[0]:
                best = (imp, f, t)
            seen += nc
            if seen >= max_features:
                break
        imp, f, t = best
        if f < 0 or not imp < parent - 1e-12:
            continue
        go_left = Zn[:, f] <= t
        li, ri = idx[go_left], idx[~go_left]
        feature[node] = f
        threshold[node] = t
        left_id = new_node(li)
        right_id = new_node(ri)
        left[node] = left_id
        right[node] = right_id
        stack.append((right_id, ri))
        stack.append((left_id, li))

    return DecisionTree(
        np.array(feature, dtype=np.int64),
        np.array(threshold, dtype=np.float64),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(value, dtype=np.float64),
        np.array(count, dtype=np.int64),
    )


@dataclass(frozen=True, eq=False)
class ForestModel:
    """Random forest whose score is the fraction of trees voting favorable."""

    trees: tuple
    n_inputs: int
    min_leaf: int = 20
    seed: int = 0
    tree_seeds: tuple = ()

    def _design(self, X, d):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.n_inputs:
            raise ValueError(f"expected {self.n_inputs} features, got {X.shape[1]}")
        d = np.broadcast_to(np.asarray(d, dtype=np.float64), (X.shape[0],))
        return np.column_stack([X, d])

    def score(self, X, d):
        Z = self._design(X, d)
        votes = np.zeros(Z.shape[0])
        for tree in self.trees:
            votes += tree.vote(Z)
        return votes / len(self.trees)

    def label(self, X, d):
        return (self.score(X, d) >= 0.5).astype(np.int64)

    def decide(self, X, d, index=None):
        return self.label(X, d)


def train_forest(train, n_trees=100, min_leaf=20, seed=0, max_features=None) -> ForestModel:
    """Fit ``n_trees`` bootstrap trees on a :class:`TabularDataset`.

    The protected attribute is appended as the last input column. Each tree
    draws a bootstrap sample of size n and considers sqrt(p) columns per
    split.
    """
    X = np.asarray(train.features, dtype=np.float64)
    y = np.asarray(train.labels)
    n = X.shape[0]
    if n == 0 or np.unique(y).size < 2:
        raise ValueError("training labels contain a single class")
    if n < min_leaf:
        raise ValueError(f"need at least min_leaf={min_leaf} rows, got {n}")
    if not np.all(np.isfinite(X)):
        raise ValueError("non-finite feature values")
    Z = np.column_stack([X, np.asarray(train.protected, dtype=np.float64)])
    tree_seeds = tuple(int(s) for s in np.random.default_rng(seed).integers(0, 2**63 - 1, n_trees))
    trees = []
    for ts in tree_seeds:
        rng = np.random.default_rng(ts)
        boot = rng.integers(0, n, n)
        trees.append(build_tree(Z[boot], y[boot], rng, min_leaf, max_features))
    return ForestModel(tuple(trees), X.shape[1], min_leaf, int(seed), tree_seeds)
