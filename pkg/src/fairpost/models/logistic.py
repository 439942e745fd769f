"""L2-regularized logistic regression fit by full-batch gradient descent."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "LogisticModel",
    "fit_logistic",
    "logistic_loss_grad",
    "sigmoid",
    "train_logistic",
]


def sigmoid(z):
    """Numerically stable logistic function."""
    z = np.asarray(z, dtype=np.float64)
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def softplus(z):
    """``log(1 + exp(z))`` without overflow."""
    return np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))


def _design(X, d, protected_input: bool):
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if not protected_input:
        return X
    d = np.broadcast_to(np.asarray(d, dtype=np.float64), (X.shape[0],))
    return np.column_stack([X, d])


@dataclass(frozen=True, eq=False)
class LogisticModel:
    """Fitted logistic model.

    When ``protected_input`` is true the protected attribute is the last
    input, so ``weights`` has one more entry than the feature matrix has
    columns and scoring at a counterfactual ``d`` is a pure input swap.
    """

    weights: np.ndarray
    intercept: float
    l2_strength: float = 1.0
    protected_input: bool = True
    n_iter: int = 0
    converged: bool = True

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        if w.ndim != 1 or not np.all(np.isfinite(w)) or not np.isfinite(self.intercept):
            raise ValueError("logistic weights must be a finite vector")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "intercept", float(self.intercept))

    @property
    def n_inputs(self) -> int:
        """Width of the feature matrix the model expects (protected excluded)."""
        return self.weights.size - int(self.protected_input)

    def decision_function(self, X, d=None):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.n_inputs:
            raise ValueError(f"expected {self.n_inputs} features, got {X.shape[1]}")
        if self.protected_input and d is None:
            raise ValueError("this model needs the protected attribute")
        return _design(X, d, self.protected_input) @ self.weights + self.intercept

    def score(self, X, d=None):
        return sigmoid(self.decision_function(X, d))

    def label(self, X, d=None):
        return (self.score(X, d) >= 0.5).astype(np.int64)

    def decide(self, X, d, index=None):
        return self.label(X, d)


def logistic_loss_grad(params, Z, y, l2_strength):
    """Regularized mean negative log-likelihood and its gradient.

    ``params`` holds the weights followed by the (unpenalized) intercept.
    The penalty is ``l2_strength / (2 n) * ||w||^2``.
    """
    n = Z.shape[0]
    w, b = params[:-1], params[-1]
    z = Z @ w + b
    loss = np.mean(softplus(z) - y * z) + 0.5 * l2_strength / n * (w @ w)
    r = sigmoid(z) - y
    grad = np.empty_like(params)
    grad[:-1] = Z.T @ r / n + l2_strength / n * w
    grad[-1] = r.mean()
    return loss, grad


def fit_logistic(X, y, l2_strength=1.0, protected=None, tol=1e-6, max_iter=5000,
                 history=None, sample_weight=None) -> LogisticModel:
    """Gradient descent with Barzilai-Borwein trial steps and Armijo backtracking.

    Starts from zero and stops once the gradient's infinity norm drops below
    ``tol`` or after ``max_iter`` iterations. Every accepted step satisfies
    the Armijo condition, so the loss never increases. Pass a list as
    ``history`` to collect the loss at each iterate. ``sample_weight``
    rescales each row's log-likelihood term (weights are normalized to mean 1).
    """
    y = np.asarray(y, dtype=np.float64)
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if not np.all(np.isfinite(X)):
        raise ValueError("non-finite feature values")
    if y.shape != (X.shape[0],) or X.shape[0] == 0:
        raise ValueError("X and y must be non-empty and of equal length")
    if np.unique(y).size < 2:
        raise ValueError("training labels contain a single class")
    if not l2_strength > 0:
        raise ValueError("l2_strength must be positive")
    has_d = protected is not None
    Z = _design(X, protected, has_d)

    n = Z.shape[0]
    lam = l2_strength / n
    if sample_weight is None:
        sw = np.ones(n)
    else:
        sw = np.asarray(sample_weight, dtype=np.float64)
        if sw.shape != (n,) or np.any(sw < 0) or not sw.sum() > 0:
            raise ValueError("sample_weight must be non-negative with positive sum")
        sw = sw * (n / sw.sum())

    def penalized(w, z):
        return np.mean(sw * (softplus(z) - y * z)) + 0.5 * lam * (w @ w)

    def gradient(w, z):
        r = sw * (sigmoid(z) - y)
        g = np.empty(w.size + 1)
        g[:-1] = Z.T @ r / n + lam * w
        g[-1] = r.mean()
        return g

    params = np.zeros(Z.shape[1] + 1)
    z = np.zeros(n)
    loss = penalized(params[:-1], z)
    grad = gradient(params[:-1], z)
    if history is not None:
        history.append(loss)
    step = 1.0
    s = g_diff = None
    converged = False
    it = 0
    for it in range(max_iter):
        if np.max(np.abs(grad)) < tol:
            converged = True
            break
        if s is not None:
            sy = s @ g_diff
            if sy > 0:
                step = (s @ s) / sy
        gg = grad @ grad
        # trial points along -grad only need this one product
        dz = Z @ grad[:-1] + grad[-1]
        while True:
            trial = params - step * grad
            z_trial = z - step * dz
            new_loss = penalized(trial[:-1], z_trial)
            if new_loss <= loss - 1e-4 * step * gg:
                break
            step *= 0.5
            if step < 1e-30:
                break
        if step < 1e-30:
            # no representable descent left; we are at the rounding floor
            break
        new_grad = gradient(trial[:-1], z_trial)
        s, g_diff = trial - params, new_grad - grad
        params, z, loss, grad = trial, z_trial, new_loss, new_grad
        if history is not None:
            history.append(loss)
    else:
        converged = bool(np.max(np.abs(grad)) < tol)
        it = max_iter

    return LogisticModel(params[:-1], params[-1], float(l2_strength), has_d, it, converged)


def train_logistic(train, l2_strength=1.0, seed=0, **kwargs) -> LogisticModel:
    """Fit the black-box logistic classifier on a :class:`TabularDataset`.

    ``seed`` is accepted for interface symmetry with the forest; the zero
    initialization makes the fit deterministic without it.
    """
    return fit_logistic(train.features, train.labels, l2_strength,
                        protected=train.protected, **kwargs)
