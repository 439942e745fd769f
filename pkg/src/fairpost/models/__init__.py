"""Black-box scored classifiers.

Every model exposes ``score(X, d)`` in [0, 1] and ``label(X, d)``, which is
1 exactly when the score is at least 0.5. ``d`` is the protected attribute,
a scalar or one value per row, so counterfactual scoring is a plain call
with the other value.
"""

from typing import Protocol

from .forest import DecisionTree, ForestModel, build_tree, train_forest
from .io import load_model, model_from_dict, model_to_dict, save_model
from .logistic import LogisticModel, fit_logistic, logistic_loss_grad, sigmoid, train_logistic


class ScoredClassifier(Protocol):
    def score(self, X, d): ...

    def label(self, X, d): ...


def score(model, x, d):
    """Score of ``model`` at feature row(s) ``x`` with protected value ``d``."""
    return model.score(x, d)


__all__ = [
    "DecisionTree",
    "ForestModel",
    "LogisticModel",
    "ScoredClassifier",
    "build_tree",
    "fit_logistic",
    "load_model",
    "logistic_loss_grad",
    "model_from_dict",
    "model_to_dict",
    "save_model",
    "score",
    "sigmoid",
    "train_forest",
    "train_logistic",
]
