"""DBSCAN and agglomerative hierarchical clustering.

Both are deterministic: DBSCAN scans objects in index order, and the
agglomerative merge loop breaks distance ties by the smallest cluster-id pair.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Union

import numpy as np

from .dataset import Metric, as_points, pairwise_distances
from .partition import NOISE, Partition

__all__ = [
    "DbscanConfig",
    "HierConfig",
    "Linkage",
    "dbscan_run",
    "hierarchical_run",
    "region_query",
]


class Linkage(str, enum.Enum):
    SINGLE = "single"
    COMPLETE = "complete"
    AVERAGE = "average"


@dataclass
class DbscanConfig:
    eps: float
    minpts: int
    metric: Metric = Metric.EUCLIDEAN

    def __post_init__(self):
        self.metric = Metric.parse(self.metric)
        if not self.eps > 0:
            raise ValueError(f"eps must be > 0, got {self.eps}")
        if self.minpts < 1:
            raise ValueError(f"minpts must be >= 1, got {self.minpts}")


@dataclass
class HierConfig:
    k: int
    linkage: Linkage = Linkage.AVERAGE
    metric: Metric = Metric.EUCLIDEAN

    def __post_init__(self):
        self.linkage = Linkage(self.linkage)
        self.metric = Metric.parse(self.metric)
        if self.k < 1:
            raise ValueError("k must be >= 1")


def region_query(data, idx: int, eps: float, m: Union[Metric, str] = Metric.EUCLIDEAN) -> set:
    """Indices of every object within ``eps`` of object ``idx`` (itself included)."""
    pts = as_points(data)
    if not 0 <= idx < pts.shape[0]:
        raise IndexError(f"object index {idx} out of range for {pts.shape[0]} objects")
    dist = pairwise_distances(pts[idx : idx + 1], pts, m)[0]
    return set(np.flatnonzero(dist <= eps).tolist())


def dbscan_run(data, cfg: DbscanConfig) -> Partition:
    pts = as_points(data)
    n = pts.shape[0]
    neighbors = pairwise_distances(pts, pts, cfg.metric) <= cfg.eps
    is_core = neighbors.sum(axis=1) >= cfg.minpts

    unvisited = -2
    labels = np.full(n, unvisited, dtype=np.int64)
    cluster = 0
    for i in range(n):
        if labels[i] != unvisited:
            continue
        if not is_core[i]:
            labels[i] = NOISE  # may be claimed later as a border point
            continue
        labels[i] = cluster
        queue = deque(np.flatnonzero(neighbors[i]).tolist())
        while queue:
            j = queue.popleft()
            if labels[j] == NOISE:
                labels[j] = cluster
            if labels[j] != unvisited:
                continue
            labels[j] = cluster
            if is_core[j]:
                queue.extend(np.flatnonzero(neighbors[j]).tolist())
        cluster += 1
    return Partition(labels, cluster)


def hierarchical_run(data, cfg: HierConfig) -> Partition:
    """Merge singletons bottom-up until ``cfg.k`` clusters remain.

    Cluster ids are the smallest object index in each cluster. Linkage
    distances are maintained with the Lance-Williams update, so average
    linkage is the size-weighted mean of pairwise distances.
    """
    pts = as_points(data)
    n = pts.shape[0]
    if cfg.k > n:
        raise ValueError(f"k={cfg.k} exceeds n_objects={n}")
    dist = pairwise_distances(pts, pts, cfg.metric).astype(float)
    np.fill_diagonal(dist, np.inf)
    sizes = np.ones(n)
    owner = np.arange(n)

    for _ in range(n - cfg.k):
        # dist is symmetric, so the first row-major minimum is the
        # lexicographically smallest (i, j) with i < j among tied pairs.
        i, j = divmod(int(np.argmin(dist)), n)
        if cfg.linkage is Linkage.SINGLE:
            merged = np.minimum(dist[i], dist[j])
        elif cfg.linkage is Linkage.COMPLETE:
            merged = np.maximum(dist[i], dist[j])
        else:
            merged = (sizes[i] * dist[i] + sizes[j] * dist[j]) / (sizes[i] + sizes[j])
        dist[i, :] = merged
        dist[:, i] = merged
        dist[i, i] = np.inf
        dist[j, :] = np.inf
        dist[:, j] = np.inf
        sizes[i] += sizes[j]
        owner[owner == j] = i

    return Partition.from_labels(owner)
