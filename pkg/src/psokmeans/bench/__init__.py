from .config import ALGORITHMS, AlgorithmSpec, ConfigError, DatasetSpec, ExperimentConfig, load_config
from .report import ExperimentReport, ReportError, emit_report
from .runner import derive_seed, run_algorithm, run_experiment

__all__ = [
    "ALGORITHMS",
    "AlgorithmSpec",
    "ConfigError",
    "DatasetSpec",
    "ExperimentConfig",
    "ExperimentReport",
    "ReportError",
    "derive_seed",
    "emit_report",
    "load_config",
    "run_algorithm",
    "run_experiment",
]
