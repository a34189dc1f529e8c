"""Typical K-means (Lloyd iterations) and the SSE fitness shared with the swarm."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .dataset import Metric, as_points, pairwise_distances
from .partition import (
    Partition,
    PartitionError,
    compute_centroids,
    repair_empty_clusters,
)

__all__ = [
    "KMeansConfig",
    "KMeansResult",
    "centroid_shift",
    "kmeans_run",
    "lloyd_step",
    "sample_initial_centers",
    "sse_fitness",
    "sse_of_centers",
]


def _squared(dist: np.ndarray, m: Metric) -> np.ndarray:
    # squared_euclidean already is D^2 for D = euclidean.
    return dist if m is Metric.SQUARED_EUCLIDEAN else dist * dist


def sse_fitness(data, centers, p: Partition, m: Union[Metric, str] = Metric.EUCLIDEAN) -> float:
    """Sum over points of the squared distance to their assigned centroid."""
    pts = as_points(data)
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    m = Metric.parse(m)
    if centers.shape[1] != pts.shape[1]:
        raise PartitionError(
            f"dimension mismatch: centroids have {centers.shape[1]} features, data {pts.shape[1]}"
        )
    if len(p) != pts.shape[0]:
        raise PartitionError(f"partition has {len(p)} labels for {pts.shape[0]} objects")
    if p.has_noise:
        raise PartitionError("fitness is undefined for noise labels")
    if p.k > centers.shape[0]:
        raise PartitionError(f"partition has {p.k} clusters but only {centers.shape[0]} centroids")
    diff = pts - centers[p.labels]
    if m is Metric.MANHATTAN:
        d = np.abs(diff).sum(axis=1)
        return float((d * d).sum())
    return float(np.einsum("ij,ij->", diff, diff))


def sse_of_centers(data, centers, m: Union[Metric, str] = Metric.EUCLIDEAN) -> float:
    """Fitness of a candidate centroid set, each point charged to its nearest center."""
    m = Metric.parse(m)
    dist = pairwise_distances(data, centers, m)
    return float(_squared(dist.min(axis=1), m).sum())


def centroid_shift(old, new, m: Union[Metric, str] = Metric.EUCLIDEAN) -> float:
    """Mean over centroids of the distance each one moved."""
    old = np.atleast_2d(old)
    new = np.atleast_2d(new)
    m = Metric.parse(m)
    diff = new - old
    if m is Metric.MANHATTAN:
        return float(np.abs(diff).sum(axis=1).mean())
    sq = np.einsum("ij,ij->i", diff, diff)
    return float((sq if m is Metric.SQUARED_EUCLIDEAN else np.sqrt(sq)).mean())


def sample_initial_centers(data, k: int, rng: np.random.Generator) -> np.ndarray:
    """``k`` distinct objects drawn uniformly without replacement."""
    pts = as_points(data)
    if not 1 <= k <= pts.shape[0]:
        raise ValueError(f"k={k} must lie in [1, n_objects={pts.shape[0]}]")
    idx = rng.choice(pts.shape[0], size=k, replace=False)
    return pts[idx].copy()


def lloyd_step(data, centers, m: Union[Metric, str] = Metric.EUCLIDEAN):
    """One assign-then-average step; empty clusters are re-seeded first.

    Returns ``(partition, new_centers)`` where ``partition`` is the assignment
    to the (repaired) input centers.
    """
    part, _ = repair_empty_clusters(data, centers, m)
    return part, compute_centroids(data, part)


@dataclass
class KMeansConfig:
    k: int
    max_iter: int = 300
    tol: float = 1e-6
    metric: Metric = Metric.EUCLIDEAN
    seed: int = 0
    init: Union[str, np.ndarray] = "random_points"

    def __post_init__(self):
        self.metric = Metric.parse(self.metric)
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.tol < 0:
            raise ValueError("tol must be >= 0")
        if isinstance(self.init, str):
            if self.init != "random_points":
                raise ValueError(f"unknown init {self.init!r}")
        else:
            self.init = np.atleast_2d(np.asarray(self.init, dtype=float))
            if self.init.shape[0] != self.k:
                raise ValueError(f"explicit init has {self.init.shape[0]} centers, k={self.k}")

    def validate_against(self, data) -> None:
        pts = as_points(data)
        if self.k > pts.shape[0]:
            raise ValueError(f"k={self.k} exceeds n_objects={pts.shape[0]}")
        if not isinstance(self.init, str) and self.init.shape[1] != pts.shape[1]:
            raise ValueError(
                f"explicit init has {self.init.shape[1]} features, data has {pts.shape[1]}"
            )


@dataclass
class KMeansResult:
    partition: Partition
    centroids: np.ndarray
    fitness: float
    iterations: int
    history: list = field(default_factory=list)
    # Per-iteration assignment and the centers it was made against.
    trace: list = field(default_factory=list, repr=False)


def kmeans_run(data, cfg: KMeansConfig) -> KMeansResult:
    """Lloyd iterations until the assignment repeats, the centroids settle, or
    ``max_iter`` is hit.

    ``history[t]`` is the fitness of the assignment made in iteration ``t+1``
    against the centers it was made with, followed by the final value.
    """
    pts = as_points(data)
    cfg.validate_against(pts)
    m = cfg.metric
    if isinstance(cfg.init, str):
        centers = sample_initial_centers(pts, cfg.k, np.random.default_rng(cfg.seed))
    else:
        centers = cfg.init.copy()

    history = []
    trace = []
    prev_labels = None
    iterations = 0
    part = None
    for iterations in range(1, cfg.max_iter + 1):
        part, centers = repair_empty_clusters(pts, centers, m)
        trace.append((centers.copy(), part))
        history.append(sse_fitness(pts, centers, part, m))
        if prev_labels is not None and np.array_equal(part.labels, prev_labels):
            break
        new_centers = compute_centroids(pts, part)
        shift = centroid_shift(centers, new_centers, m)
        centers = new_centers
        prev_labels = part.labels
        if shift < cfg.tol:
            break

    # Final centers are the means of the last assignment.
    fitness = sse_fitness(pts, centers, part, m)
    history.append(fitness)
    return KMeansResult(part, centers, fitness, iterations, history, trace)
