"""Cluster assignments, centroids and contingency tables."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .dataset import Metric, as_points, pairwise_distances

__all__ = [
    "NOISE",
    "ContingencyTable",
    "Partition",
    "PartitionError",
    "assign_nearest",
    "compute_centroids",
    "contingency",
    "read_labels",
    "repair_empty_clusters",
    "write_labels",
]

NOISE = -1


class PartitionError(ValueError):
    pass


@dataclass(frozen=True)
class Partition:
    """Per-object cluster ids in ``[0, k)``, or :data:`NOISE`.

    Construction does not reject empty clusters because :func:`assign_nearest`
    must be able to report them; check :attr:`empty_clusters` or call
    :meth:`validate` where the full invariant is needed.
    """

    labels: np.ndarray
    k: int

    def __post_init__(self):
        labels = np.array(self.labels, dtype=np.int64).ravel()
        bad = (labels != NOISE) & ((labels < 0) | (labels >= self.k))
        if bad.any():
            raise PartitionError(f"cluster id {labels[bad][0]} outside [0, {self.k})")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_labels(cls, labels: Sequence) -> "Partition":
        """Relabel arbitrary ids to ``0..k-1`` by first appearance; -1 stays noise."""
        mapping: dict = {}
        out = []
        for lab in labels:
            if lab == NOISE:
                out.append(NOISE)
                continue
            out.append(mapping.setdefault(lab, len(mapping)))
        return cls(np.array(out, dtype=np.int64), len(mapping))

    def __len__(self):
        return self.labels.size

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels[self.labels != NOISE], minlength=self.k)

    @property
    def empty_clusters(self) -> list:
        return [int(i) for i in np.flatnonzero(self.sizes == 0)]

    @property
    def n_noise(self) -> int:
        return int((self.labels == NOISE).sum())

    @property
    def has_noise(self) -> bool:
        return self.n_noise > 0

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.labels == cluster)

    def validate(self) -> "Partition":
        if self.empty_clusters:
            raise PartitionError(f"empty clusters: {self.empty_clusters}")
        return self

    def without_noise(self) -> tuple:
        """Return ``(kept_index, partition)`` with noise removed and ids compacted."""
        keep = np.flatnonzero(self.labels != NOISE)
        return keep, Partition.from_labels(self.labels[keep])


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray
    row_sizes: np.ndarray
    col_sizes: np.ndarray
    n: int
    row_labels: tuple = ()
    col_labels: tuple = ()

    def transpose(self) -> "ContingencyTable":
        return ContingencyTable(
            self.counts.T.copy(), self.col_sizes, self.row_sizes, self.n,
            self.col_labels, self.row_labels,
        )


def _label_array(x) -> np.ndarray:
    if isinstance(x, Partition):
        return x.labels
    return np.asarray(list(x)) if not isinstance(x, np.ndarray) else x


def assign_nearest(data, centers, m: Union[Metric, str] = Metric.EUCLIDEAN) -> Partition:
    """Assign every object to its closest center; ties go to the lowest index.

    The result may contain empty clusters (see ``Partition.empty_clusters``).
    """
    pts = as_points(data)
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    if centers.shape[1] != pts.shape[1]:
        raise PartitionError(
            f"dimension mismatch: centroids have {centers.shape[1]} features, data {pts.shape[1]}"
        )
    # np.argmin returns the first minimum, which is the tie-break we want.
    labels = np.argmin(pairwise_distances(pts, centers, m), axis=1)
    return Partition(labels, centers.shape[0])


def compute_centroids(data, p: Partition) -> np.ndarray:
    """Arithmetic mean of each cluster's members, as a ``k x n_features`` matrix."""
    pts = as_points(data)
    if len(p) != pts.shape[0]:
        raise PartitionError(f"partition has {len(p)} labels for {pts.shape[0]} objects")
    if p.has_noise:
        raise PartitionError("cannot compute centroids of a partition containing noise")
    sizes = p.sizes
    if (sizes == 0).any():
        raise PartitionError(f"empty clusters: {p.empty_clusters}")
    sums = np.zeros((p.k, pts.shape[1]))
    np.add.at(sums, p.labels, pts)
    return sums / sizes[:, None]


def repair_empty_clusters(data, centers, m: Union[Metric, str] = Metric.EUCLIDEAN):
    """Move each centroid that captured no points onto the worst-served point.

    The point chosen is the one farthest from its nearest centroid, so it
    becomes a singleton cluster. Repeats until no cluster is empty. Returns
    ``(partition, centers)``.
    """
    pts = as_points(data)
    centers = np.array(centers, dtype=float)
    if centers.shape[0] > pts.shape[0]:
        raise PartitionError(f"k={centers.shape[0]} exceeds n_objects={pts.shape[0]}")
    part = assign_nearest(pts, centers, m)
    for _ in range(4 * pts.shape[0]):
        if not part.empty_clusters:
            return part, centers
        empty = part.empty_clusters[0]
        dmat = pairwise_distances(pts, centers, m)
        nearest = dmat[np.arange(pts.shape[0]), part.labels]
        # Only take points whose cluster can spare them.
        donors = part.sizes[part.labels] > 1
        nearest = np.where(donors, nearest, -np.inf)
        pick = int(np.argmax(nearest))
        if not nearest[pick] > 0:
            raise PartitionError("cannot fill empty cluster: fewer distinct points than clusters")
        centers[empty] = pts[pick]
        part = assign_nearest(pts, centers, m)
    raise PartitionError("empty-cluster repair did not converge")


def contingency(a, b) -> ContingencyTable:
    """Overlap counts between two labelings of the same objects.

    Rows follow the sorted distinct labels of ``a``, columns those of ``b``.
    Noise (``-1`` inside a :class:`Partition`) must be removed by the caller.
    """
    for x in (a, b):
        if isinstance(x, Partition) and x.has_noise:
            raise PartitionError("noise labels present; exclude them before building a contingency table")
    la, lb = _label_array(a), _label_array(b)
    if len(la) != len(lb):
        raise PartitionError(f"length mismatch: {len(la)} vs {len(lb)}")
    rows, ai = np.unique(la, return_inverse=True)
    cols, bi = np.unique(lb, return_inverse=True)
    counts = np.zeros((rows.size, cols.size), dtype=np.int64)
    np.add.at(counts, (ai.ravel(), bi.ravel()), 1)
    return ContingencyTable(
        counts,
        counts.sum(axis=1),
        counts.sum(axis=0),
        int(len(la)),
        tuple(rows.tolist()),
        tuple(cols.tolist()),
    )


def write_labels(p: Partition, path: Union[str, Path]) -> Path:
    """Single-column CSV of integer labels, noise written as -1."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["label"])
        for lab in p.labels:
            w.writerow([int(lab)])
    return path


def read_labels(path: Union[str, Path]) -> Partition:
    path = Path(path)
    out = []
    with path.open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not row[0].strip():
                continue
            cell = row[0].strip()
            try:
                out.append(int(cell))
            except ValueError:
                if lineno == 1:
                    continue  # header
                raise PartitionError(f"{path}: line {lineno}: {cell!r} is not an integer label") from None
    if not out:
        raise PartitionError(f"{path}: no labels")
    if any(v < NOISE for v in out):
        raise PartitionError(f"{path}: negative labels other than -1 are not allowed")
    return Partition.from_labels(out)
