"""Dataset loading, min-max normalization and distance metrics.

Class labels, when present, ride along with the points so they can be used
for external validation; no clustering routine ever reads them.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

__all__ = [
    "Dataset",
    "DatasetError",
    "Metric",
    "as_points",
    "distance",
    "load_csv",
    "make_synthetic_blobs",
    "normalize_minmax",
    "pairwise_distances",
    "write_csv",
]


class DatasetError(ValueError):
    """Raised for unreadable or malformed dataset input."""


class Metric(str, enum.Enum):
    EUCLIDEAN = "euclidean"
    SQUARED_EUCLIDEAN = "squared_euclidean"
    MANHATTAN = "manhattan"

    @classmethod
    def parse(cls, value: Union[str, "Metric"]) -> "Metric":
        if isinstance(value, Metric):
            return value
        try:
            return cls(str(value).lower().replace("-", "_"))
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown metric {value!r} (expected one of: {names})") from None


@dataclass(frozen=True)
class Dataset:
    """Dense real-valued feature matrix with optional ground-truth labels."""

    points: np.ndarray
    labels: Optional[tuple] = None
    feature_names: tuple = ()
    name: str = "dataset"

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise DatasetError(f"points must be a non-empty 2-D matrix, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise DatasetError("points contain NaN or infinite values")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != pts.shape[0]:
                raise DatasetError(
                    f"label count {len(labels)} does not match object count {pts.shape[0]}"
                )
            object.__setattr__(self, "labels", labels)

        names = tuple(self.feature_names) or tuple(f"f{j}" for j in range(pts.shape[1]))
        if len(names) != pts.shape[1]:
            raise DatasetError(
                f"{len(names)} feature names given for {pts.shape[1]} features"
            )
        object.__setattr__(self, "feature_names", names)

    @property
    def n_objects(self) -> int:
        return self.points.shape[0]

    @property
    def n_features(self) -> int:
        return self.points.shape[1]

    @property
    def n_classes(self) -> Optional[int]:
        if self.labels is None:
            return None
        return len(set(self.labels))


def as_points(data) -> np.ndarray:
    """Return the 2-D float matrix behind a Dataset or an array-like."""
    if isinstance(data, Dataset):
        return data.points
    pts = np.asarray(data, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    return pts


def _parse_label(cell: str):
    cell = cell.strip()
    try:
        return int(cell)
    except ValueError:
        return cell


def load_csv(
    path: Union[str, Path],
    has_header: bool = False,
    label_column: Optional[int] = None,
    name: Optional[str] = None,
) -> Dataset:
    """Read a comma-separated file into a :class:`Dataset`.

    ``label_column`` may be negative (counted from the end). Missing or
    non-numeric feature cells are rejected; the error names the 1-based row
    and column of the offending cell as they appear in the file.
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if any(c.strip() for c in r)]
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc.strerror or exc}") from exc

    header = None
    first_row = 1
    if has_header and rows:
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
        first_row = 2
    if not rows:
        raise DatasetError(f"{path}: no data rows")

    width = len(header) if header is not None else len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise DatasetError(
                f"{path}: row {i + first_row} has {len(row)} columns, expected {width}"
            )

    label_idx = None
    if label_column is not None:
        label_idx = label_column if label_column >= 0 else width + label_column
        if not 0 <= label_idx < width:
            raise DatasetError(f"{path}: label column {label_column} out of range for {width} columns")
    feature_cols = [j for j in range(width) if j != label_idx]
    if not feature_cols:
        raise DatasetError(f"{path}: no feature columns")

    values = np.empty((len(rows), len(feature_cols)))
    for i, row in enumerate(rows):
        for out_j, j in enumerate(feature_cols):
            cell = row[j].strip()
            try:
                v = float(cell)
            except ValueError:
                v = math.nan
            if not math.isfinite(v):
                raise DatasetError(
                    f"{path}: row {i + first_row}, column {j + 1}: "
                    f"cannot parse {row[j]!r} as a finite number"
                )
            values[i, out_j] = v

    labels = None
    if label_idx is not None:
        labels = tuple(_parse_label(row[label_idx]) for row in rows)
    names = tuple(header[j] for j in feature_cols) if header is not None else ()
    return Dataset(values, labels=labels, feature_names=names, name=name or path.stem)


def write_csv(d: Dataset, path: Union[str, Path], header: bool = True) -> Path:
    """Write ``d`` to CSV; labels (if any) go in column 0. Floats use repr."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow((["label"] if d.labels is not None else []) + list(d.feature_names))
        for i, row in enumerate(d.points):
            cells = [repr(float(v)) for v in row]
            if d.labels is not None:
                cells.insert(0, str(d.labels[i]))
            w.writerow(cells)
    return path


def normalize_minmax(d: Dataset) -> Dataset:
    """Rescale every feature column to [0, 1]; constant columns become 0."""
    pts = d.points
    lo = pts.min(axis=0)
    span = pts.max(axis=0) - lo
    scaled = np.zeros_like(pts)
    nz = span > 0
    scaled[:, nz] = (pts[:, nz] - lo[nz]) / span[nz]
    # Guard against 1 + eps from rounding so a second pass is a no-op.
    np.clip(scaled, 0.0, 1.0, out=scaled)
    return replace(d, points=scaled)


def distance(a: Sequence[float], b: Sequence[float], m: Union[Metric, str] = Metric.EUCLIDEAN) -> float:
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise ValueError(f"vector length mismatch: {a.size} vs {b.size}")
    m = Metric.parse(m)
    diff = a - b
    if m is Metric.MANHATTAN:
        return float(np.abs(diff).sum())
    sq = float(diff @ diff)
    return sq if m is Metric.SQUARED_EUCLIDEAN else math.sqrt(sq)


def pairwise_distances(x, y=None, m: Union[Metric, str] = Metric.EUCLIDEAN) -> np.ndarray:
    """Distance matrix between the rows of ``x`` and ``y`` (``y`` defaults to ``x``)."""
    x = as_points(x)
    y = x if y is None else as_points(y)
    if x.shape[1] != y.shape[1]:
        raise ValueError(f"dimension mismatch: {x.shape[1]} vs {y.shape[1]} features")
    m = Metric.parse(m)
    diff = x[:, None, :] - y[None, :, :]
    if m is Metric.MANHATTAN:
        return np.abs(diff).sum(axis=2)
    sq = np.einsum("ijk,ijk->ij", diff, diff)
    return sq if m is Metric.SQUARED_EUCLIDEAN else np.sqrt(sq)


def make_synthetic_blobs(
    n_objects: int = 305,
    n_features: int = 7,
    n_classes: int = 5,
    seed: int = 0,
    spread: float = 1.0,
    box: float = 10.0,
    name: str = "air-pollution-synthetic",
) -> Dataset:
    """Seeded Gaussian blobs, a stand-in with the shape of the air-pollution table.

    Class sizes differ by at most one; centers are uniform in ``[0, box]^f``.
    """
    if n_classes < 1 or n_objects < n_classes:
        raise DatasetError("need 1 <= n_classes <= n_objects")
    rng = np.random.default_rng(seed)
    centers = rng.uniform(0.0, box, size=(n_classes, n_features))
    labels = np.arange(n_objects) % n_classes
    points = centers[labels] + rng.normal(0.0, spread, size=(n_objects, n_features))
    return Dataset(
        points,
        labels=tuple(int(c) for c in labels),
        feature_names=tuple(f"x{j + 1}" for j in range(n_features)),
        name=name,
    )
