"""Command line entry point.

Exit codes: 0 success, 1 runtime failure (missing data, unwritable output,
failed run), 2 invalid usage.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from ..data import DATASETS, DataError, load_dataset, write_prepared
from ..postprocess import METHODS
from .config import ConfigError, ExperimentConfig, read_config_file
from .experiment import run_experiment
from .report import emit_report, load_results

log = logging.getLogger("fairpost")

OUTPUT_ENV = "FAIRPOST_OUTPUT_DIR"
TASKS = tuple((name, attr) for name, attrs in DATASETS.items() for attr in attrs)

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _output_dir(explicit, default):
    if explicit:
        return explicit
    return os.environ.get(OUTPUT_ENV, default)


def _methods(text):
    methods = tuple(m.strip() for m in text.split(",") if m.strip())
    bad = [m for m in methods if m not in METHODS]
    if bad or not methods:
        raise argparse.ArgumentTypeError(f"methods must be a comma list drawn from {METHODS}")
    return methods


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairpost",
        description="Individual+group debiasing experiments on adult, german and compas.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare", help="encode a raw CSV into the prepared cache")
    p.add_argument("--dataset", required=True, choices=sorted(DATASETS))
    p.add_argument("--protected", help="attribute to prepare (default: every one)")
    p.add_argument("--input", required=True, help="raw file or directory")
    p.add_argument("--output", help="output directory (default: data/prepared)")

    p = sub.add_parser("run", help="run one experiment configuration")
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--dataset", choices=sorted(DATASETS))
    p.add_argument("--protected")
    p.add_argument("--classifier", choices=("logistic", "forest"))
    p.add_argument("--methods", type=_methods)
    p.add_argument("--splits", type=int, dest="n_splits")
    p.add_argument("--seed", type=int, dest="base_seed")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--data", dest="data_path", help="raw data directory/file or prepared CSV")
    p.add_argument("--output", dest="output_dir")
    p.add_argument("--tau-target", choices=("smallest", "center"))
    p.add_argument("--bias-population", choices=("all", "unprivileged"))
    p.add_argument("--l2-strength", type=float)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--formats", default="csv,json,svg")

    p = sub.add_parser("report", help="re-render outputs from a result.json")
    p.add_argument("--input", required=True)
    p.add_argument("--output", help="output directory (default: next to the input)")
    p.add_argument("--formats", default="csv,svg")

    p = sub.add_parser("replicate", help="all six tasks x 25 splits, logistic base")
    p.add_argument("--data", dest="data_path", default="data/raw")
    p.add_argument("--output")
    p.add_argument("--splits", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=0.2)
    p.add_argument("--classifier", choices=("logistic", "forest"), default="logistic")
    p.add_argument("--jobs", type=int, default=1)
    return parser


def _formats(text):
    formats = tuple(f.strip() for f in text.split(",") if f.strip())
    if not formats or set(formats) - {"csv", "json", "svg"}:
        raise UsageError("--formats must be a comma list drawn from csv,json,svg")
    return formats


def cmd_prepare(args):
    attrs = [args.protected] if args.protected else list(DATASETS[args.dataset])
    if args.protected and args.protected not in DATASETS[args.dataset]:
        raise UsageError(f"--protected must be one of {DATASETS[args.dataset]}")
    out = Path(args.output or "data/prepared")
    for attr in attrs:
        ds = load_dataset(args.dataset, attr, args.input)
        csv_path, sidecar = write_prepared(ds, out / f"{args.dataset}_{attr}.csv")
        print(f"{csv_path} ({len(ds)} rows, {ds.n_features} features), sidecar {sidecar}")
    return EXIT_OK


def cmd_run(args):
    values = read_config_file(args.config) if args.config else {}
    for key in ("dataset", "protected", "classifier", "methods", "n_splits", "base_seed",
                "epsilon", "data_path", "output_dir", "tau_target", "bias_population",
                "l2_strength"):
        v = getattr(args, key)
        if v is not None:
            values[key] = v
    if "dataset" not in values or "protected" not in values:
        raise UsageError("run needs --dataset and --protected (flags or config file)")
    values["output_dir"] = _output_dir(values.get("output_dir"), "results")
    formats = _formats(args.formats)
    config = ExperimentConfig.from_dict(values)
    result = run_experiment(config, jobs=args.jobs)
    paths = emit_report(result, config.output_dir, formats)
    _summarize([result])
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_report(args):
    results = load_results(args.input)
    out = args.output or str(Path(args.input).parent)
    for p in emit_report(results, out, _formats(args.formats)):
        print(p)
    return EXIT_OK


def cmd_replicate(args):
    out = Path(_output_dir(args.output, "results/replicate"))
    results = []
    for name, attr in TASKS:
        config = ExperimentConfig(name, attr, classifier=args.classifier, n_splits=args.splits,
                                  base_seed=args.seed, epsilon=args.epsilon,
                                  output_dir=str(out / f"{name}_{attr}"),
                                  data_path=args.data_path)
        log.info("running %s", config.task)
        result = run_experiment(config, jobs=args.jobs)
        emit_report(result, config.output_dir)
        results.append(result)
    paths = emit_report(results, out)
    _summarize(results)
    for p in paths:
        print(p)
    return EXIT_OK


def _summarize(results):
    def fmt(v):
        return "   n/a" if v is None else f"{v:6.3f}"

    print(f"{'task':<14}{'method':<7}{'bal.acc':>8}{'DI':>8}{'ind.bias':>9}{'det.acc':>8}")
    for res in results:
        for a in res.aggregates:
            print(f"{res.task:<14}{a['method']:<7}{fmt(a['balanced_accuracy']):>8}"
                  f"{fmt(a['disparate_impact']):>8}{fmt(a['individual_bias']):>9}"
                  f"{fmt(a['detector_balanced_accuracy']):>8}")


COMMANDS = {"prepare": cmd_prepare, "run": cmd_run, "report": cmd_report,
            "replicate": cmd_replicate}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on bad flags
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        parser.print_usage(sys.stderr)
        print(f"fairpost: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError, ValueError, RuntimeError) as exc:
        print(f"fairpost: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
