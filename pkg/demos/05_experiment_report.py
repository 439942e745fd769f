"""Running a small multi-split experiment and writing the reports.

This is what ``fairpost run`` does; ``fairpost replicate`` repeats it for
all six dataset/attribute pairs with 25 splits each.
"""

import tempfile
from pathlib import Path

from fairpost.harness.config import ExperimentConfig
from fairpost.harness.experiment import run_experiment
from fairpost.harness.report import emit_report

config = ExperimentConfig("german", "age", n_splits=5, base_seed=0, epsilon=0.2,
                          data_path="data/raw")
result = run_experiment(config)

for agg in result.aggregates:
    print(f"{agg['method']:<5} bal.acc {agg['balanced_accuracy']:.3f} "
          f"± {agg['balanced_accuracy_std']:.3f}   DI {agg['disparate_impact']:.3f}   "
          f"ind.bias {agg['individual_bias']:.3f}")
    if agg["note"]:
        print("      note:", agg["note"])

out = Path(tempfile.mkdtemp(prefix="fairpost-demo-"))
for path in emit_report(result, out):
    print("wrote", path)
