"""Training the two black-box classifiers and scoring counterfactuals.

Both models take the protected attribute as an input, so each row can be
scored twice: once as it is and once with ``d`` flipped.
"""

from fairpost.data import load_dataset, split_dataset
from fairpost.metrics import balanced_accuracy
from fairpost.models import train_forest, train_logistic

ds = load_dataset("german", "age", "data/raw")
train, val, test = (ds.subset(i) for i in split_dataset(ds, seed=1))

logit = train_logistic(train, l2_strength=1.0)
print(f"logistic: {logit.n_iter} iterations, converged={logit.converged}")
print(f"  weight on the protected input {logit.weights[-1]:+.3f}")

forest = train_forest(train, n_trees=100, min_leaf=20, seed=1)
print(f"forest: {len(forest.trees)} trees, "
      f"{sum(t.n_leaves for t in forest.trees) / len(forest.trees):.1f} leaves per tree")

for name, model in (("logistic", logit), ("forest", forest)):
    pred = model.label(test.features, test.protected)
    print(f"{name:>9} test balanced accuracy {balanced_accuracy(test.labels, pred):.3f}")

# Counterfactual scoring: the same applicant scored as unprivileged and as privileged.
x = test.features[:3]
print("score at d=0:", logit.score(x, 0).round(3))
print("score at d=1:", logit.score(x, 1).round(3))
