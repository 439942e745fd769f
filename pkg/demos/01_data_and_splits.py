"""Loading a benchmark table and cutting it into train/validation/test.

Run from the repository root after ``python scripts/fetch_data.py``::

    python demos/01_data_and_splits.py
"""

import numpy as np

from fairpost.data import load_dataset, split_dataset

# German credit with sex as the protected attribute. Numeric columns are
# standardized, categoricals are one-hot encoded, and the other protected
# attribute (age > 25) stays in as an ordinary binary feature.
ds = load_dataset("german", "sex", "data/raw")
print(f"{ds.name}: {len(ds)} rows, {ds.n_features} features")
print("first features:", ", ".join(ds.feature_names[:6]), "...")
print(f"privileged share {ds.protected.mean():.3f}, favorable share {ds.labels.mean():.3f}")

# One seed gives one 60/20/20 partition; the harness uses base_seed + i for split i.
train_idx, val_idx, test_idx = split_dataset(ds, seed=0)
print("split sizes:", len(train_idx), len(val_idx), len(test_idx))
assert np.intersect1d(train_idx, test_idx).size == 0

# The same seed always reproduces the same partition.
again = split_dataset(ds, seed=0)
print("deterministic:", all(np.array_equal(a, b) for a, b in zip(again, (train_idx, val_idx, test_idx))))
