"""The 15-point one-dimensional K-means walk-through.

Three clusters seeded at 10, 22 and 1, Manhattan distance, raw values.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, Metric, pairwise_distances
from .kmeans import KMeansConfig, kmeans_run
from .validity import davies_bouldin, davies_bouldin_ratios, dunn, dunn_pairwise

TOY_POINTS = (10, 12, 15, 7, 22, 29, 31, 3, 7, 5, 1, 4, 12, 11, 10)
TOY_INIT = (10, 22, 1)


def toy_dataset() -> Dataset:
    return Dataset(np.array(TOY_POINTS, dtype=float).reshape(-1, 1), name="toy")


@dataclass
class ToyResult:
    points: np.ndarray
    iterations: list  # (centers, distances, labels, sizes) per Lloyd pass
    final_centroids: np.ndarray
    converged_at: int
    db_centers: np.ndarray
    db_scatter: np.ndarray
    db_ratios: np.ndarray
    db_value: float
    dunn_table: np.ndarray
    dunn_value: float


def run_toy() -> ToyResult:
    d = toy_dataset()
    m = Metric.MANHATTAN
    res = kmeans_run(d, KMeansConfig(k=3, metric=m, init=np.array(TOY_INIT, float).reshape(-1, 1)))
    passes = []
    for centers, part in res.trace:
        dist = pairwise_distances(d.points, centers, m)
        passes.append((centers.ravel().copy(), dist, part.labels.copy(), part.sizes.copy()))

    part = res.partition
    db_centers = np.array(TOY_INIT, float).reshape(-1, 1)
    ratios = davies_bouldin_ratios(d, part, m, centroids=db_centers)
    scatter = np.array(
        [np.abs(d.points[part.labels == c, 0] - db_centers[c, 0]).mean() for c in range(3)]
    )
    return ToyResult(
        points=d.points.ravel(),
        iterations=passes,
        final_centroids=res.centroids.ravel(),
        converged_at=res.iterations,
        db_centers=db_centers.ravel(),
        db_scatter=scatter,
        db_ratios=ratios,
        db_value=davies_bouldin(d, part, m, centroids=db_centers),
        dunn_table=dunn_pairwise(d, part, m),
        dunn_value=dunn(d, part, m),
    )


def _fmt(v: float) -> str:
    return f"{v:g}" if float(v).is_integer() else f"{v:.3f}"


def format_toy(r: ToyResult) -> str:
    lines = []
    for t, (centers, dist, labels, sizes) in enumerate(r.iterations, start=1):
        lines.append(f"Iteration {t}: centroids " + ", ".join(_fmt(c) for c in centers))
        lines.append("object\tClust1\tClust2\tClust3\tassigned")
        for x, row, lab in zip(r.points, dist, labels):
            lines.append(f"{_fmt(x)}\t" + "\t".join(_fmt(v) for v in row) + f"\tClust{lab + 1}")
        for c in range(len(centers)):
            members = ", ".join(_fmt(x) for x in r.points[labels == c])
            lines.append(f"Clust{c + 1} = {{{members}}}\t{sizes[c]} items")
        lines.append("")
    lines.append(
        f"Converged at iteration {r.converged_at}; final centroids "
        + ", ".join(_fmt(c) for c in r.final_centroids)
    )
    lines.append("")
    lines.append("Davies-Bouldin against centroids " + ", ".join(_fmt(c) for c in r.db_centers))
    lines.append("  scatter: " + ", ".join(f"{s:.4f}" for s in r.db_scatter))
    for i, j in ((0, 1), (1, 2), (0, 2)):
        lines.append(f"  ratio(Clust{i + 1}, Clust{j + 1}) = {r.db_ratios[i, j]:.4f}")
    lines.append(f"  DB = {r.db_value:.4f}")
    lines.append("")
    lines.append("Dunn diagnostics: min gap(i, j) / diameter(i)")
    k = r.dunn_table.shape[0]
    for i in range(k):
        for j in range(k):
            if i != j:
                lines.append(f"  D[{i + 1},{j + 1}] = {r.dunn_table[i, j]:.4f}")
    lines.append(f"  Dunn = {r.dunn_value:.4f}")
    return "\n".join(lines)
