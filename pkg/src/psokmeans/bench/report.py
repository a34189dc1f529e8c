"""Experiment report container and its CSV/JSON writers."""
from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["INDEX_ROWS", "PER_TRIAL_COLUMNS", "ExperimentReport", "ReportError", "emit_report"]

PER_TRIAL_COLUMNS = (
    "dataset", "algorithm", "trial", "seed", "silhouette", "db", "dunn", "rand",
    "mirkin_norm", "accuracy", "fitness", "iterations", "runtime_ms", "excluded_noise",
)
# Wall-clock values would break byte-for-byte reproducibility of report.json.
_JSON_EXCLUDED = {"runtime_ms"}

INDEX_ROWS = (("Dunn", "dunn"), ("DB", "db"), ("Rand", "rand"), ("Mirkin", "mirkin_norm"))


class ReportError(RuntimeError):
    pass


@dataclass
class ExperimentReport:
    algorithms: list
    datasets: list
    trials: int
    base_seed: int
    metric: str
    dataset_info: dict = field(default_factory=dict)
    parameters: dict = field(default_factory=dict)
    per_trial: list = field(default_factory=list)
    silhouette_table: dict = field(default_factory=dict)
    accuracy_table: dict = field(default_factory=dict)
    index_tables: dict = field(default_factory=dict)
    anova_tables: dict = field(default_factory=dict)
    boxplot_data: dict = field(default_factory=dict)
    errors: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "algorithms": list(self.algorithms),
            "datasets": list(self.datasets),
            "trials": self.trials,
            "base_seed": self.base_seed,
            "metric": self.metric,
            "dataset_info": self.dataset_info,
            "parameters": self.parameters,
            "silhouette_table": self.silhouette_table,
            "accuracy_table": self.accuracy_table,
            "index_tables": self.index_tables,
            "anova_tables": self.anova_tables,
            "boxplot_data": self.boxplot_data,
            "per_trial": [
                {k: v for k, v in rec.items() if k not in _JSON_EXCLUDED} for rec in self.per_trial
            ],
            "errors": self.errors,
        }

    def to_json(self) -> str:
        return json.dumps(_clean(self.to_dict()), indent=2, allow_nan=False) + "\n"


def _clean(obj):
    # JSON has no NaN/inf; numpy scalars need plain Python types.
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name).strip("_") or "dataset"


def _write_csv(path: Path, header, rows) -> Path:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])
    return path


def emit_report(r: ExperimentReport, directory, formats=("csv", "json")) -> list:
    """Write one file per table per format; return the paths written."""
    if not r.per_trial:
        raise ReportError("report has no trials; nothing to write")
    bad = set(formats) - {"csv", "json"}
    if bad:
        raise ReportError(f"unknown report formats: {sorted(bad)}")
    out = Path(directory)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ReportError(f"cannot create output directory {out}: {exc}") from exc

    written = []
    try:
        if "json" in formats:
            path = out / "report.json"
            path.write_text(r.to_json(), encoding="utf-8")
            written.append(path)
        if "csv" in formats:
            written.extend(_emit_csv(r, out))
    except OSError as exc:
        raise ReportError(f"failed writing report to {out}: {exc}") from exc
    return written


def _emit_csv(r: ExperimentReport, out: Path) -> list:
    algos = list(r.algorithms)
    written = [
        _write_csv(
            out / "per_trial.csv",
            PER_TRIAL_COLUMNS,
            ([rec.get(c) for c in PER_TRIAL_COLUMNS] for rec in r.per_trial),
        )
    ]
    sil_rows = []
    for ds, row in r.silhouette_table.items():
        for stat in ("mean", "best"):
            sil_rows.append([ds, stat] + [row[a][stat] for a in algos])
    written.append(_write_csv(out / "silhouette_table.csv", ["dataset", "statistic"] + algos, sil_rows))
    written.append(
        _write_csv(
            out / "accuracy_table.csv",
            ["dataset"] + algos,
            ([ds] + [row[a] for a in algos] for ds, row in r.accuracy_table.items()),
        )
    )
    for ds, table in r.index_tables.items():
        written.append(
            _write_csv(
                out / f"indices_{_slug(ds)}.csv",
                ["index"] + algos,
                ([label] + [table[label][a] for a in algos] for label, _ in INDEX_ROWS),
            )
        )
    for ds, res in r.anova_tables.items():
        path = out / f"anova_{_slug(ds)}.csv"
        if res.get("table") is None:
            written.append(_write_csv(path, ["status", "reason"], [[res["status"], res.get("reason", "")]]))
            continue
        t = res["table"]
        written.append(
            _write_csv(
                path,
                ["source", "SS", "df", "MS", "F", "Prob>F"],
                [
                    ["Columns", t["ss_columns"], t["df_columns"], t["ms_columns"], t["f"], t["prob_gt_f"]],
                    ["Error", t["ss_error"], t["df_error"], t["ms_error"], None, None],
                    ["Total", t["ss_total"], t["df_total"], None, None, None],
                ],
            )
        )
    for ds, per_algo in r.boxplot_data.items():
        rows = []
        for a in algos:
            b = per_algo.get(a)
            if b is None:
                rows.append([a, None, None, None, None, None, ""])
            else:
                rows.append(
                    [a, b["min"], b["q1"], b["median"], b["q3"], b["max"], ";".join(repr(v) for v in b["outliers"])]
                )
        written.append(
            _write_csv(out / f"boxplot_{_slug(ds)}.csv", ["algorithm", "min", "q1", "median", "q3", "max", "outliers"], rows)
        )
    if r.errors:
        keys = ("dataset", "algorithm", "trial", "stage", "error")
        written.append(_write_csv(out / "errors.csv", keys, ([e.get(k) for k in keys] for e in r.errors)))
    return written
