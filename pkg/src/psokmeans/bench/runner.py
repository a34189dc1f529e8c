"""Run every (dataset, algorithm, trial) cell and assemble the report."""
from __future__ import annotations

import hashlib
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..dataset import Dataset, Metric
from ..density_hier import DbscanConfig, HierConfig, dbscan_run, hierarchical_run
from ..kmeans import KMeansConfig, kmeans_run, sse_fitness
from ..partition import Partition, compute_centroids
from ..stats import AnovaError, anova_oneway, boxplot_stats
from ..swarm import PsoConfig, pso_kmeans_run
from ..validity import evaluate
from .config import ExperimentConfig
from .report import INDEX_ROWS, ExperimentReport

__all__ = ["derive_seed", "run_algorithm", "run_experiment"]

log = logging.getLogger(__name__)


def derive_seed(base_seed: int, dataset: str, algorithm: str, trial: int) -> int:
    """Stable 63-bit seed for one cell; independent of process and hash salt."""
    key = f"{base_seed}|{dataset}|{algorithm}|{trial}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big") & (2**63 - 1)


@dataclass
class AlgorithmOutcome:
    partition: Partition
    fitness: Optional[float]
    iterations: int


def _partition_sse(d: Dataset, p: Partition, m: Metric) -> Optional[float]:
    keep, clean = p.without_noise()
    if clean.k == 0:
        return None
    pts = d.points[keep]
    return sse_fitness(pts, compute_centroids(pts, clean), clean, m)


def run_algorithm(name: str, d: Dataset, k: int, params: dict, metric: Metric, seed: int) -> AlgorithmOutcome:
    if name == "kmeans":
        r = kmeans_run(d, KMeansConfig(k=k, metric=metric, seed=seed, **params))
        return AlgorithmOutcome(r.partition, r.fitness, r.iterations)
    if name in ("simple-pso", "canonical-pso"):
        variant = name.split("-")[0]
        r = pso_kmeans_run(d, PsoConfig(k=k, variant=variant, metric=metric, seed=seed, **params))
        return AlgorithmOutcome(r.partition, r.fitness, r.iterations)
    if name == "dbscan":
        p = dbscan_run(d, DbscanConfig(metric=metric, **params))
        return AlgorithmOutcome(p, _partition_sse(d, p, metric), 1)
    if name == "hierarchical":
        p = hierarchical_run(d, HierConfig(k=k, metric=metric, **params))
        return AlgorithmOutcome(p, _partition_sse(d, p, metric), 1)
    raise ValueError(f"unknown algorithm {name!r}")


def _run_cell(task):
    ds_name, d, algo, k, params, metric, trial, seed = task
    rec = {
        "dataset": ds_name,
        "algorithm": algo,
        "trial": trial,
        "seed": seed,
        "silhouette": None,
        "db": None,
        "dunn": None,
        "rand": None,
        "mirkin_norm": None,
        "accuracy": None,
        "fitness": None,
        "iterations": None,
        "runtime_ms": None,
        "excluded_noise": None,
        "n_clusters": None,
        "replicated": False,
    }
    errors = []
    start = time.perf_counter()
    try:
        out = run_algorithm(algo, d, k, params, metric, seed)
    except Exception as exc:  # noqa: BLE001 - one bad cell must not stop the grid
        errors.append({"dataset": ds_name, "algorithm": algo, "trial": trial, "stage": "cluster", "error": str(exc)})
        rec["runtime_ms"] = (time.perf_counter() - start) * 1e3
        return rec, errors
    rec["runtime_ms"] = (time.perf_counter() - start) * 1e3
    rec["fitness"] = out.fitness
    rec["iterations"] = out.iterations
    rep = evaluate(d, out.partition, metric, truth=d.labels)
    rec.update(rep.csv_row())
    rec["n_clusters"] = rep.n_clusters
    for index, msg in rep.errors.items():
        errors.append({"dataset": ds_name, "algorithm": algo, "trial": trial, "stage": index, "error": msg})
    return rec, errors


def _mean(values):
    if not values or any(v is None for v in values):
        return None
    return math.fsum(values) / len(values)


def _best(values, higher=True):
    vals = [v for v in values if v is not None]
    if not vals:
        return None
    return max(vals) if higher else min(vals)


def run_experiment(cfg: ExperimentConfig, jobs: Optional[int] = None) -> ExperimentReport:
    """Run the configured grid. Output is identical for any ``jobs`` value."""
    jobs = cfg.jobs if jobs is None else jobs
    algo_names = [a.name for a in cfg.algorithms]
    report = ExperimentReport(
        algorithms=algo_names,
        datasets=[d.name for d in cfg.datasets],
        trials=cfg.trials,
        base_seed=cfg.base_seed,
        metric=cfg.metric.value,
    )

    tasks = []
    for ds in cfg.datasets:
        try:
            d = ds.load()
            k = ds.cluster_count(d)
        except ValueError as exc:
            report.errors.append({"dataset": ds.name, "algorithm": None, "trial": None, "stage": "load", "error": str(exc)})
            continue
        report.dataset_info[ds.name] = {
            "n_objects": d.n_objects,
            "n_features": d.n_features,
            "n_classes": d.n_classes,
            "k": k,
            "normalized": ds.normalize,
            "source": str(ds.path) if ds.path is not None else "synthetic",
        }
        for algo in cfg.algorithms:
            params = cfg.params_for(algo, ds)
            report.parameters.setdefault(ds.name, {})[algo.name] = params
            # Deterministic methods run once; their row is replicated below.
            n_runs = 1 if algo.deterministic else cfg.trials
            for trial in range(n_runs):
                seed = derive_seed(cfg.base_seed, ds.name, algo.name, trial)
                tasks.append((ds.name, d, algo.name, k, params, cfg.metric, trial, seed))

    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_cell, tasks))
    else:
        results = [_run_cell(t) for t in tasks]

    deterministic = {a.name for a in cfg.algorithms if a.deterministic}
    for (rec, errors), task in zip(results, tasks):
        report.errors.extend(errors)
        if rec["algorithm"] in deterministic:
            for trial in range(cfg.trials):
                row = dict(rec, trial=trial, replicated=trial > 0)
                report.per_trial.append(row)
        else:
            report.per_trial.append(rec)

    _aggregate(report, cfg)
    return report


def _aggregate(report: ExperimentReport, cfg: ExperimentConfig) -> None:
    by_cell = {}
    for rec in report.per_trial:
        by_cell.setdefault((rec["dataset"], rec["algorithm"]), []).append(rec)

    for ds in report.datasets:
        if ds not in report.dataset_info:
            continue
        sil_row, acc_row, box_row = {}, {}, {}
        idx_table = {label: {} for label, _ in INDEX_ROWS}
        for algo in report.algorithms:
            recs = by_cell.get((ds, algo), [])
            sil = [r["silhouette"] for r in recs]
            sil_row[algo] = {"mean": _mean(sil), "best": _best(sil)}
            acc_row[algo] = _mean([r["accuracy"] for r in recs])
            for label, key in INDEX_ROWS:
                idx_table[label][algo] = _mean([r[key] for r in recs])
            vals = [v for v in sil if v is not None]
            box_row[algo] = boxplot_stats(vals).to_dict() if vals else None
        report.silhouette_table[ds] = sil_row
        report.accuracy_table[ds] = acc_row
        report.index_tables[ds] = idx_table
        report.boxplot_data[ds] = box_row
        report.anova_tables[ds] = _anova(ds, by_cell, report.algorithms, cfg)


def _anova(ds, by_cell, algorithms, cfg: ExperimentConfig) -> dict:
    deterministic = {a.name for a in cfg.algorithms if a.deterministic}
    included, skipped = [], []
    for algo in algorithms:
        if algo in deterministic and not cfg.force_anova_all:
            skipped.append({"algorithm": algo, "reason": "deterministic (zero within-group variance)"})
            continue
        sil = [r["silhouette"] for r in by_cell.get((ds, algo), [])]
        if not sil or any(v is None for v in sil):
            skipped.append({"algorithm": algo, "reason": "missing silhouette values"})
            continue
        included.append((algo, sil))
    notice = {"groups": [a for a, _ in included], "skipped": skipped, "samples_per_group": cfg.trials}
    try:
        table = anova_oneway([np.array(s) for _, s in included])
    except AnovaError as exc:
        return {"status": "refused", "reason": str(exc), **notice}
    out = {"status": "ok", **notice, "table": table.to_dict()}
    if table.degenerate:
        out["status"] = "degenerate"
        out["reason"] = "zero within-group variance with nonzero between-group variance; F is infinite"
    return out
