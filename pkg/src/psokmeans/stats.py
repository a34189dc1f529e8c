"""One-way ANOVA, the F distribution, and box-plot summaries."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from typing import List, Sequence

import numpy as np

__all__ = [
    "AnovaError",
    "AnovaTable",
    "BoxplotStats",
    "anova_from_sums",
    "anova_oneway",
    "betainc_regularized",
    "boxplot_stats",
    "f_cdf",
    "f_sf",
]

_EPS = 1e-16
_TINY = 1e-300


class AnovaError(ValueError):
    pass


def _betacf(a: float, b: float, x: float, max_iter: int = 10000) -> float:
    # Modified Lentz evaluation of the incomplete-beta continued fraction.
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc_regularized(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta ``I_x(a, b)`` for ``a, b > 0`` and ``0 <= x <= 1``."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    # The fraction converges fast only on the side x < (a + 1) / (a + b + 2).
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def f_cdf(x: float, d1: int, d2: int) -> float:
    """P(F <= x) for the F(d1, d2) distribution."""
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    if d1 <= 0 or d2 <= 0:
        raise ValueError("degrees of freedom must be positive")
    if math.isinf(x):
        return 1.0
    return betainc_regularized(d1 / 2.0, d2 / 2.0, d1 * x / (d1 * x + d2))


def f_sf(x: float, d1: int, d2: int) -> float:
    """P(F > x), evaluated directly so tiny tail probabilities keep their precision."""
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    if d1 <= 0 or d2 <= 0:
        raise ValueError("degrees of freedom must be positive")
    if math.isinf(x):
        return 0.0
    return betainc_regularized(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * x))


@dataclass
class AnovaTable:
    ss_columns: float
    df_columns: int
    ss_error: float
    df_error: int
    ss_total: float
    df_total: int
    ms_columns: float
    ms_error: float
    f: float
    prob_gt_f: float
    group_sizes: List[int] = field(default_factory=list)
    degenerate: bool = False

    def rows(self):
        """(source, SS, df, MS, F, Prob>F) rows in the usual layout."""
        return [
            ("Columns", self.ss_columns, self.df_columns, self.ms_columns, self.f, self.prob_gt_f),
            ("Error", self.ss_error, self.df_error, self.ms_error, None, None),
            ("Total", self.ss_total, self.df_total, None, None, None),
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["source", "SS", "df", "MS", "F", "Prob>F"])
        for row in self.rows():
            w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return asdict(self)


def anova_from_sums(ss_columns: float, df_columns: int, ss_error: float, df_error: int) -> AnovaTable:
    """Build the table from precomputed sums of squares and degrees of freedom.

    With zero error variance and a nonzero between-group term the F ratio is
    infinite; the table then carries ``f = inf``, ``prob_gt_f = 0`` and
    ``degenerate = True``.
    """
    if df_columns < 1 or df_error < 1:
        raise AnovaError(f"need positive degrees of freedom, got {df_columns} and {df_error}")
    if ss_columns < 0 or ss_error < 0:
        raise AnovaError("sums of squares must be nonnegative")
    ms_c = ss_columns / df_columns
    ms_e = ss_error / df_error
    degenerate = False
    if ms_e > 0:
        f = ms_c / ms_e
        prob = f_sf(f, df_columns, df_error)
    elif ms_c > 0:
        f, prob, degenerate = math.inf, 0.0, True
    else:
        f, prob = 0.0, 1.0
    return AnovaTable(
        ss_columns, df_columns, ss_error, df_error,
        ss_columns + ss_error, df_columns + df_error,
        ms_c, ms_e, f, prob, degenerate=degenerate,
    )


def anova_oneway(groups: Sequence[Sequence[float]]) -> AnovaTable:
    groups = [np.asarray(g, dtype=float).ravel() for g in groups]
    if len(groups) < 2:
        raise AnovaError(f"need at least 2 groups, got {len(groups)}")
    sizes = [g.size for g in groups]
    if min(sizes) < 1:
        raise AnovaError("every group needs at least one sample")
    total = sum(sizes)
    if total <= len(groups):
        raise AnovaError(f"need more samples ({total}) than groups ({len(groups)})")
    grand = np.concatenate(groups).mean()
    # Center on the grand mean first so large offsets do not cancel badly.
    centered = [g - grand for g in groups]
    means = [c.mean() for c in centered]
    ss_c = float(sum(n * mu * mu for n, mu in zip(sizes, means)))
    ss_e = float(sum(((c - mu) ** 2).sum() for c, mu in zip(centered, means)))
    table = anova_from_sums(ss_c, len(groups) - 1, ss_e, total - len(groups))
    table.group_sizes = sizes
    return table


@dataclass
class BoxplotStats:
    min: float
    q1: float
    median: float
    q3: float
    max: float
    outliers: List[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def boxplot_stats(samples: Sequence[float], whis: float = 1.5) -> BoxplotStats:
    """Five-number summary with Tukey fences at ``whis * IQR``.

    Quartiles use linear interpolation between order statistics. ``min`` and
    ``max`` are the whisker ends, i.e. the extremes of the non-outliers,
    clamped to the quartiles when interpolation puts a quartile beyond every
    non-outlier (as matplotlib does).
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("boxplot_stats needs at least one sample")
    q1, med, q3 = (float(v) for v in np.percentile(x, [25, 50, 75]))
    iqr = q3 - q1
    lo, hi = q1 - whis * iqr, q3 + whis * iqr
    inside = x[(x >= lo) & (x <= hi)]
    outliers = sorted(float(v) for v in x[(x < lo) | (x > hi)])
    lo_whisker = min(float(inside.min()), q1)
    hi_whisker = max(float(inside.max()), q3)
    return BoxplotStats(lo_whisker, q1, med, q3, hi_whisker, outliers)
