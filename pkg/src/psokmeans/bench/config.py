"""Experiment configuration, read from a TOML file.

Schema (paths are resolved relative to the config file)::

    base_seed = 2014
    trials = 20
    metric = "euclidean"
    output_dir = "results"
    report_formats = ["csv", "json"]
    force_anova_all = false
    algorithms = ["kmeans", "dbscan", "hierarchical", "simple-pso", "canonical-pso"]

    [params.canonical-pso]          # per-algorithm defaults
    max_iter = 150

    [[datasets]]
    name = "wine"
    path = "../data/wine.csv"
    label_column = 0
    has_header = false
    normalize = false
    k = 3
    [datasets.params.dbscan]        # per-dataset overrides
    eps = 40.0
    minpts = 5

    [[datasets]]
    name = "air-pollution-synthetic"
    [datasets.synthetic]
    n_objects = 305
    n_features = 7
    n_classes = 5
    seed = 7
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..dataset import Dataset, Metric, load_csv, make_synthetic_blobs, normalize_minmax
from ..density_hier import DbscanConfig, HierConfig
from ..kmeans import KMeansConfig
from ..swarm import PsoConfig

__all__ = [
    "ALGORITHMS",
    "AlgorithmSpec",
    "ConfigError",
    "DatasetSpec",
    "ExperimentConfig",
    "load_config",
]

# Display order used by every comparison table.
ALGORITHMS = ("kmeans", "dbscan", "hierarchical", "simple-pso", "canonical-pso")
DETERMINISTIC = frozenset({"dbscan", "hierarchical"})

_ALLOWED_PARAMS = {
    "kmeans": {"max_iter", "tol"},
    "dbscan": {"eps", "minpts"},
    "hierarchical": {"linkage"},
    "simple-pso": {
        "n_particles", "c1", "c2", "chi", "max_iter", "tol", "kmeans_refine", "per_coordinate_random",
    },
    "canonical-pso": {
        "n_particles", "c1", "c2", "chi", "max_iter", "tol", "kmeans_refine", "per_coordinate_random",
    },
}

DEFAULT_PARAMS = {
    "kmeans": {"max_iter": 300, "tol": 1e-6},
    "dbscan": {"eps": 25.0, "minpts": 65},
    "hierarchical": {"linkage": "average"},
    "simple-pso": {"n_particles": 20, "max_iter": 150, "tol": 0.0, "kmeans_refine": False},
    "canonical-pso": {"n_particles": 20, "max_iter": 150, "tol": 0.0, "kmeans_refine": False},
}


class ConfigError(ValueError):
    pass


@dataclass
class AlgorithmSpec:
    name: str
    params: dict = field(default_factory=dict)

    @property
    def deterministic(self) -> bool:
        return self.name in DETERMINISTIC


@dataclass
class DatasetSpec:
    name: str
    path: Optional[Path] = None
    synthetic: Optional[dict] = None
    label_column: Optional[int] = None
    has_header: bool = False
    normalize: bool = False
    k: Optional[int] = None
    params: dict = field(default_factory=dict)

    def load(self) -> Dataset:
        if self.synthetic is not None:
            d = make_synthetic_blobs(name=self.name, **self.synthetic)
        else:
            d = load_csv(self.path, has_header=self.has_header, label_column=self.label_column, name=self.name)
        return normalize_minmax(d) if self.normalize else d

    def cluster_count(self, d: Dataset) -> int:
        if self.k is not None:
            return self.k
        if d.labels is None:
            raise ConfigError(f"dataset {self.name!r}: no k given and no class labels to infer it from")
        return d.n_classes


@dataclass
class ExperimentConfig:
    datasets: list
    algorithms: list
    trials: int = 20
    base_seed: int = 0
    metric: Metric = Metric.EUCLIDEAN
    output_dir: Path = Path("results")
    report_formats: tuple = ("csv", "json")
    force_anova_all: bool = False
    jobs: int = 1

    def __post_init__(self):
        self.metric = Metric.parse(self.metric)
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.datasets:
            raise ConfigError("no datasets configured")
        if not self.algorithms:
            raise ConfigError("no algorithms configured")
        bad = set(self.report_formats) - {"csv", "json"}
        if bad:
            raise ConfigError(f"unknown report formats: {sorted(bad)}")
        names = [d.name for d in self.datasets]
        if len(set(names)) != len(names):
            raise ConfigError("dataset names must be unique")
        for a in self.algorithms:
            if a.name not in _ALLOWED_PARAMS:
                raise ConfigError(f"unknown algorithm {a.name!r} (expected one of {', '.join(ALGORITHMS)})")
            _check_params(a.name, a.params, "params")
        for d in self.datasets:
            for algo, over in d.params.items():
                if algo not in _ALLOWED_PARAMS:
                    raise ConfigError(f"dataset {d.name!r}: overrides for unknown algorithm {algo!r}")
                _check_params(algo, over, f"dataset {d.name!r}")
            if d.k is not None and (not isinstance(d.k, int) or d.k < 1):
                raise ConfigError(f"dataset {d.name!r}: k must be a positive integer")
            for a in self.algorithms:
                _check_values(a.name, self.params_for(a, d), self.metric, f"dataset {d.name!r}")

    def params_for(self, algo: AlgorithmSpec, ds: DatasetSpec) -> dict:
        return {**DEFAULT_PARAMS[algo.name], **algo.params, **ds.params.get(algo.name, {})}


def _check_params(algo: str, params: dict, where: str) -> None:
    unknown = set(params) - _ALLOWED_PARAMS[algo]
    if unknown:
        raise ConfigError(f"{where}: unknown parameters for {algo}: {sorted(unknown)}")


def _check_values(algo: str, params: dict, metric: Metric, where: str) -> None:
    """Build the module's own config object so its range checks run up front."""
    try:
        if algo == "kmeans":
            KMeansConfig(k=1, metric=metric, **params)
        elif algo in ("simple-pso", "canonical-pso"):
            PsoConfig(k=1, variant=algo.split("-")[0], metric=metric, **params)
        elif algo == "dbscan":
            DbscanConfig(metric=metric, **params)
        else:
            HierConfig(k=1, metric=metric, **params)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: invalid {algo} parameters: {exc}") from None


def _dataset_spec(raw: dict, base: Path) -> DatasetSpec:
    raw = dict(raw)
    name = raw.pop("name", None)
    if not name:
        raise ConfigError("every dataset needs a name")
    path = raw.pop("path", None)
    synthetic = raw.pop("synthetic", None)
    if (path is None) == (synthetic is None):
        raise ConfigError(f"dataset {name!r}: give exactly one of 'path' or 'synthetic'")
    spec = DatasetSpec(
        name=name,
        path=(base / path) if path is not None else None,
        synthetic=dict(synthetic) if synthetic is not None else None,
        label_column=raw.pop("label_column", None),
        has_header=bool(raw.pop("has_header", False)),
        normalize=bool(raw.pop("normalize", False)),
        k=raw.pop("k", None),
        params={k: dict(v) for k, v in raw.pop("params", {}).items()},
    )
    if raw:
        raise ConfigError(f"dataset {name!r}: unknown keys {sorted(raw)}")
    return spec


def config_from_dict(raw: dict, base: Path = Path(".")) -> ExperimentConfig:
    raw = dict(raw)
    try:
        datasets = [_dataset_spec(d, base) for d in raw.pop("datasets", [])]
        params = raw.pop("params", {})
        names = raw.pop("algorithms", list(ALGORITHMS))
        extra = set(params) - set(names)
        if extra:
            raise ConfigError(f"params given for algorithms not in the run: {sorted(extra)}")
        algorithms = [AlgorithmSpec(n, dict(params.get(n, {}))) for n in names]
        cfg = ExperimentConfig(
            datasets=datasets,
            algorithms=algorithms,
            trials=int(raw.pop("trials", 20)),
            base_seed=int(raw.pop("base_seed", 0)),
            metric=raw.pop("metric", "euclidean"),
            output_dir=base / raw.pop("output_dir", "results"),
            report_formats=tuple(raw.pop("report_formats", ("csv", "json"))),
            force_anova_all=bool(raw.pop("force_anova_all", False)),
            jobs=int(raw.pop("jobs", 1)),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    if raw:
        raise ConfigError(f"unknown top-level keys: {sorted(raw)}")
    return cfg


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(raw, base=path.parent)
