"""Individual bias, disparate impact and balanced accuracy of a base model.

A row carries individual bias when the model's label changes if only its
protected attribute is flipped. The soft bias score is the corresponding
score difference and is what the IGD detector is trained from.
"""

import numpy as np

from fairpost.data import load_dataset, split_dataset
from fairpost.metrics import evaluate, individual_bias_indicator, individual_bias_score
from fairpost.models import train_logistic

ds = load_dataset("compas", "sex", "data/raw")
train, val, test = (ds.subset(i) for i in split_dataset(ds, seed=0))
model = train_logistic(train)

report = evaluate(model, test)
print(f"balanced accuracy {report.balanced_accuracy:.3f}")
print(f"disparate impact  {report.disparate_impact:.3f}  (1.0 is parity)")
print(f"individual bias   {report.individual_bias:.3f}  (fraction of test rows)")

# Rows with individual bias are exactly those whose two scores straddle 0.5.
flagged = individual_bias_indicator(model, test.features) == 1
s0, s1 = model.score(test.features, 0), model.score(test.features, 1)
print("straddle check:", np.array_equal(flagged, (s0 >= 0.5) != (s1 >= 0.5)))

scores = individual_bias_score(model, test.features[test.protected == 0])
print(f"soft bias scores of unprivileged rows: min {scores.min():+.3f}, max {scores.max():+.3f}")
