"""Internal and external cluster validity indices.

Internal: silhouette, Davies-Bouldin, Dunn. External (against reference
labels): Rand, Mirkin, best-mapping accuracy.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from .dataset import Metric, as_points, pairwise_distances
from .partition import Partition, PartitionError, compute_centroids, contingency

__all__ = [
    "ValidityError",
    "IndexReport",
    "accuracy",
    "davies_bouldin",
    "davies_bouldin_ratios",
    "dunn",
    "dunn_pairwise",
    "evaluate",
    "mirkin",
    "rand_index",
    "silhouette",
]


class ValidityError(ValueError):
    """An index is undefined for the given partition."""


def _partition(p) -> Partition:
    return p if isinstance(p, Partition) else Partition.from_labels(p)


def _check(pts: np.ndarray, p: Partition, min_clusters: int = 2) -> None:
    if len(p) != pts.shape[0]:
        raise PartitionError(f"partition has {len(p)} labels for {pts.shape[0]} objects")
    if p.has_noise:
        raise PartitionError("noise labels present; exclude them first")
    nonempty = int((p.sizes > 0).sum())
    if nonempty < min_clusters:
        raise ValidityError(f"need at least {min_clusters} non-empty clusters, got {nonempty}")


def silhouette(data, p, m: Union[Metric, str] = Metric.EUCLIDEAN):
    """Return ``(overall, per_sample, per_cluster)`` silhouette widths.

    Samples in singleton clusters score 0. ``per_cluster[c]`` is the mean
    width over cluster ``c``.
    """
    pts = as_points(data)
    p = _partition(p)
    _check(pts, p)
    dist = pairwise_distances(pts, pts, m)
    sizes = p.sizes
    onehot = np.zeros((pts.shape[0], p.k))
    onehot[np.arange(pts.shape[0]), p.labels] = 1.0
    sums = dist @ onehot  # sums[i, c] = total distance from i to members of c
    own = p.labels
    n_i = np.arange(pts.shape[0])
    own_size = sizes[own]

    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(own_size > 1, sums[n_i, own] / np.maximum(own_size - 1, 1), 0.0)
        means = sums / sizes[None, :]
    means[n_i, own] = np.inf
    means[:, sizes == 0] = np.inf
    b = means.min(axis=1)
    denom = np.maximum(a, b)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(denom > 0, (b - a) / denom, 0.0)
    s = np.where(own_size > 1, s, 0.0)
    per_cluster = np.array(
        [s[own == c].mean() if sizes[c] else math.nan for c in range(p.k)]
    )
    return float(s.mean()), s, per_cluster


def _scatter(pts, p: Partition, centers, m) -> np.ndarray:
    d = pairwise_distances(pts, centers, m)[np.arange(pts.shape[0]), p.labels]
    return np.bincount(p.labels, weights=d, minlength=p.k) / p.sizes


def davies_bouldin_ratios(data, p, m: Union[Metric, str] = Metric.EUCLIDEAN, centroids=None) -> np.ndarray:
    """Matrix of ``(scatter_i + scatter_j) / d(center_i, center_j)``; diagonal NaN.

    ``scatter`` is the mean member-to-center distance. Centers default to
    cluster means; pass ``centroids`` to score against fixed centers.
    """
    pts = as_points(data)
    p = _partition(p)
    _check(pts, p)
    p.validate()
    centers = compute_centroids(pts, p) if centroids is None else np.atleast_2d(np.asarray(centroids, float))
    if centers.shape != (p.k, pts.shape[1]):
        raise PartitionError(f"expected {p.k} centroids of dimension {pts.shape[1]}, got {centers.shape}")
    scatter = _scatter(pts, p, centers, m)
    sep = pairwise_distances(centers, centers, m)
    k = p.k
    for i in range(k):
        for j in range(i + 1, k):
            if sep[i, j] == 0:
                raise ValidityError(f"clusters {i} and {j} have coincident centroids")
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = (scatter[:, None] + scatter[None, :]) / sep
    np.fill_diagonal(ratios, np.nan)
    return ratios


def davies_bouldin(data, p, m: Union[Metric, str] = Metric.EUCLIDEAN, centroids=None) -> float:
    """Mean over clusters of the worst scatter-to-separation ratio. Lower is better."""
    ratios = davies_bouldin_ratios(data, p, m, centroids)
    return float(np.nanmax(ratios, axis=1).mean())


def _min_inter_and_diameters(pts, p: Partition, m):
    dist = pairwise_distances(pts, pts, m)
    k = p.k
    members = [p.members(c) for c in range(k)]
    diam = np.array(
        [dist[np.ix_(idx, idx)].max() if idx.size > 1 else 0.0 for idx in members]
    )
    inter = np.full((k, k), np.nan)
    for i in range(k):
        for j in range(i + 1, k):
            inter[i, j] = inter[j, i] = dist[np.ix_(members[i], members[j])].min()
    return inter, diam


def dunn(data, p, m: Union[Metric, str] = Metric.EUCLIDEAN) -> float:
    """Smallest point-to-point gap between clusters over the largest cluster diameter."""
    pts = as_points(data)
    p = _partition(p)
    _check(pts, p)
    p.validate()
    inter, diam = _min_inter_and_diameters(pts, p, m)
    dmax = diam.max()
    if dmax == 0:
        raise ValidityError("every cluster has zero diameter")
    return float(np.nanmin(inter) / dmax)


def dunn_pairwise(data, p, m: Union[Metric, str] = Metric.EUCLIDEAN) -> np.ndarray:
    """Diagnostic table: entry ``(i, j)`` is the min gap between clusters i and j
    divided by the diameter of cluster i. Diagonal and rows of singleton
    clusters are NaN.
    """
    pts = as_points(data)
    p = _partition(p)
    _check(pts, p)
    p.validate()
    inter, diam = _min_inter_and_diameters(pts, p, m)
    with np.errstate(divide="ignore", invalid="ignore"):
        table = inter / diam[:, None]
    table[diam == 0, :] = np.nan
    return table


def _pair_counts(a, b):
    t = contingency(a, b)
    n = t.n
    comb = lambda x: x * (x - 1) // 2  # noqa: E731
    together_both = int(comb(t.counts).sum())
    together_a = int(comb(t.row_sizes).sum())
    together_b = int(comb(t.col_sizes).sum())
    total = comb(n)
    apart_both = total - together_a - together_b + together_both
    return together_both, apart_both, total, t


def rand_index(a, b) -> float:
    """Fraction of object pairs on which the two labelings agree."""
    if len(a) != len(b):
        raise PartitionError(f"length mismatch: {len(a)} vs {len(b)}")
    if len(a) < 2:
        raise ValidityError("Rand index needs at least 2 objects")
    together, apart, total, _ = _pair_counts(a, b)
    return (together + apart) / total


def mirkin(a, b):
    """Return ``(raw, normalized)`` equivalence-mismatch distance.

    ``raw = sum |A_i|^2 + sum |B_j|^2 - 2 sum m_ij^2``, which counts every
    disagreeing ordered pair; ``normalized = raw / n^2``.
    """
    t = contingency(a, b)
    if t.n == 0:
        raise ValidityError("Mirkin distance needs at least 1 object")
    raw = int((t.row_sizes ** 2).sum() + (t.col_sizes ** 2).sum() - 2 * (t.counts ** 2).sum())
    return raw, raw / t.n ** 2


def accuracy(pred, truth: Sequence) -> float:
    """Fraction of objects correct under the best one-to-one cluster-to-class map.

    Noise objects in ``pred`` are always counted as wrong.
    """
    if truth is None:
        raise ValidityError("accuracy needs ground-truth labels")
    pred = _partition(pred)
    truth = list(truth)
    if len(pred) != len(truth):
        raise PartitionError(f"length mismatch: {len(pred)} vs {len(truth)}")
    keep, clean = pred.without_noise()
    if keep.size == 0:
        return 0.0
    t = contingency(clean, [truth[i] for i in keep])
    rows, cols = linear_sum_assignment(t.counts, maximize=True)
    return float(t.counts[rows, cols].sum()) / len(truth)


@dataclass
class IndexReport:
    silhouette_overall: Optional[float] = None
    silhouette_per_cluster: list = field(default_factory=list)
    db: Optional[float] = None
    dunn: Optional[float] = None
    rand: Optional[float] = None
    mirkin_raw: Optional[int] = None
    mirkin_normalized: Optional[float] = None
    accuracy: Optional[float] = None
    excluded_noise: int = 0
    n_clusters: int = 0
    errors: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    CSV_FIELDS = ("silhouette", "db", "dunn", "rand", "mirkin_norm", "accuracy", "excluded_noise")

    def csv_row(self) -> dict:
        return {
            "silhouette": self.silhouette_overall,
            "db": self.db,
            "dunn": self.dunn,
            "rand": self.rand,
            "mirkin_norm": self.mirkin_normalized,
            "accuracy": self.accuracy,
            "excluded_noise": self.excluded_noise,
        }


def evaluate(data, p, m: Union[Metric, str] = Metric.EUCLIDEAN, truth: Optional[Sequence] = None) -> IndexReport:
    """Compute every index; one that is undefined is recorded in ``errors``.

    Noise objects are dropped before all indices except accuracy, where they
    count as misclassified. ``excluded_noise`` records how many were dropped.
    """
    pts = as_points(data)
    p = _partition(p)
    keep, clean = p.without_noise()
    kept_pts = pts[keep]
    rep = IndexReport(excluded_noise=p.n_noise, n_clusters=clean.k)

    def attempt(name, fn):
        try:
            return fn()
        except (ValueError, IndexError, ArithmeticError) as exc:
            rep.errors[name] = str(exc)
            return None

    sil = attempt("silhouette", lambda: silhouette(kept_pts, clean, m))
    if sil is not None:
        rep.silhouette_overall = sil[0]
        rep.silhouette_per_cluster = [float(v) for v in sil[2]]
    rep.db = attempt("db", lambda: davies_bouldin(kept_pts, clean, m))
    rep.dunn = attempt("dunn", lambda: dunn(kept_pts, clean, m))
    if truth is not None:
        truth = list(truth)
        kept_truth = [truth[i] for i in keep]
        rep.rand = attempt("rand", lambda: rand_index(clean.labels, kept_truth))
        mk = attempt("mirkin", lambda: mirkin(clean.labels, kept_truth))
        if mk is not None:
            rep.mirkin_raw, rep.mirkin_normalized = mk
        rep.accuracy = attempt("accuracy", lambda: accuracy(p, truth))
    return rep
