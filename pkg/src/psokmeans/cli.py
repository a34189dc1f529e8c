"""Command-line entry point.

    psokmeans run CONFIG.toml [--jobs N] [--output-dir DIR] [--force-anova-all]
    psokmeans cluster DATA.csv --algo canonical-pso -k 3 --seed 1
    psokmeans indices DATA.csv LABELS.csv [--label-column 0]
    psokmeans toy

Exit codes: 0 success, 1 runtime error, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

from .bench.config import ALGORITHMS, ConfigError, load_config
from .bench.report import emit_report
from .bench.runner import run_algorithm, run_experiment
from .dataset import Metric, load_csv, normalize_minmax
from .partition import read_labels, write_labels
from .toy import format_toy, run_toy
from .validity import evaluate

log = logging.getLogger("psokmeans")


def _add_dataset_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--label-column", type=int, default=None,
                   help="column holding class labels (negative counts from the end)")
    p.add_argument("--header", action="store_true", help="first row is a header")
    p.add_argument("--normalize", action="store_true", help="min-max scale features to [0, 1]")
    p.add_argument("--metric", default="euclidean", choices=[m.value for m in Metric])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="psokmeans", description="PSO based K-means and cluster validity benchmark")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a full experiment from a TOML config")
    run.add_argument("config")
    run.add_argument("--jobs", type=int, default=None, help="worker processes (default: config value)")
    run.add_argument("--output-dir", default=None, help="override the config's output_dir")
    run.add_argument("--force-anova-all", action="store_true",
                     help="include deterministic algorithms in the ANOVA")

    cl = sub.add_parser("cluster", help="cluster one dataset and print its validity indices")
    cl.add_argument("dataset")
    cl.add_argument("--algo", required=True, choices=ALGORITHMS)
    cl.add_argument("-k", type=int, default=None, help="cluster count (default: number of classes)")
    cl.add_argument("--seed", type=int, default=0)
    _add_dataset_args(cl)
    cl.add_argument("--max-iter", type=int)
    cl.add_argument("--tol", type=float)
    cl.add_argument("--particles", type=int, dest="n_particles")
    cl.add_argument("--c1", type=float)
    cl.add_argument("--c2", type=float)
    cl.add_argument("--chi", type=float)
    cl.add_argument("--refine", action="store_true", dest="kmeans_refine",
                    help="apply one Lloyd step to each particle after it moves")
    cl.add_argument("--eps", type=float)
    cl.add_argument("--minpts", type=int)
    cl.add_argument("--linkage", choices=["single", "complete", "average"])
    cl.add_argument("--labels-out", help="write the partition as a one-column CSV")

    ix = sub.add_parser("indices", help="score an external labeling of a dataset")
    ix.add_argument("dataset")
    ix.add_argument("labels")
    _add_dataset_args(ix)

    sub.add_parser("toy", help="print the 15-point K-means walk-through")
    return parser


_ALGO_FLAGS = {
    "kmeans": ("max_iter", "tol"),
    "simple-pso": ("max_iter", "tol", "n_particles", "c1", "c2", "chi", "kmeans_refine"),
    "canonical-pso": ("max_iter", "tol", "n_particles", "c1", "c2", "chi", "kmeans_refine"),
    "dbscan": ("eps", "minpts"),
    "hierarchical": ("linkage",),
}


def _load(args):
    d = load_csv(args.dataset, has_header=args.header, label_column=args.label_column)
    return normalize_minmax(d) if args.normalize else d


def _cmd_cluster(args) -> int:
    from .bench.config import DEFAULT_PARAMS

    d = _load(args)
    k = args.k if args.k is not None else d.n_classes
    if k is None:
        raise ValueError("-k is required when the dataset has no label column")
    params = dict(DEFAULT_PARAMS[args.algo])
    for name in _ALGO_FLAGS[args.algo]:
        val = getattr(args, name)
        if val not in (None, False):
            params[name] = val
    metric = Metric.parse(args.metric)
    out = run_algorithm(args.algo, d, k, params, metric, args.seed)
    rep = evaluate(d, out.partition, metric, truth=d.labels)
    if args.labels_out:
        write_labels(out.partition, args.labels_out)
    print(json.dumps({
        "dataset": d.name,
        "algorithm": args.algo,
        "k": k,
        "seed": args.seed,
        "fitness": out.fitness,
        "iterations": out.iterations,
        "indices": rep.to_dict(),
    }, indent=2))
    return 0


def _cmd_indices(args) -> int:
    d = _load(args)
    p = read_labels(args.labels)
    if len(p) != d.n_objects:
        raise ValueError(f"{args.labels} has {len(p)} labels but {args.dataset} has {d.n_objects} objects")
    print(evaluate(d, p, Metric.parse(args.metric), truth=d.labels).to_json(indent=2))
    return 0


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.force_anova_all:
        cfg.force_anova_all = True
    out_dir = Path(args.output_dir) if args.output_dir else cfg.output_dir
    report = run_experiment(cfg, jobs=args.jobs)
    load_errors = [e for e in report.errors if e["stage"] == "load"]
    for e in load_errors:
        print(f"psokmeans run: cannot load dataset {e['dataset']!r}: {e['error']}", file=sys.stderr)
    if not report.per_trial and load_errors:
        raise RuntimeError("no dataset could be loaded; nothing to run")
    files = emit_report(report, out_dir, cfg.report_formats)
    for f in files:
        print(f)
    if report.errors:
        print(f"{len(report.errors)} cell-level errors recorded (see errors.csv / report.json)", file=sys.stderr)
    return 0


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    handlers = {"run": _cmd_run, "cluster": _cmd_cluster, "indices": _cmd_indices}
    try:
        if args.command == "toy":
            print(format_toy(run_toy()))
            return 0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return handlers[args.command](args)
    except (ConfigError, ValueError, OSError, RuntimeError) as exc:
        print(f"psokmeans {args.command}: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
