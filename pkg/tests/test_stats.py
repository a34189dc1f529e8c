import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from psokmeans.stats import (
    AnovaError,
    anova_from_sums,
    anova_oneway,
    betainc_regularized,
    boxplot_stats,
    f_cdf,
    f_sf,
)

from . import oracles


def test_anova_hand_example():
    t = anova_oneway([[1, 2, 3], [2, 3, 4], [3, 4, 5]])
    assert t.ss_columns == pytest.approx(6, rel=1e-14)
    assert t.ss_error == pytest.approx(6, rel=1e-14)
    assert (t.df_columns, t.df_error, t.df_total) == (2, 6, 8)
    assert t.f == pytest.approx(3, rel=1e-14)
    # P(F(2, 6) > 3) = 1 - integral of the density from 0 to 3.
    assert t.prob_gt_f == pytest.approx(1 - oracles.f_cdf_quadrature(3, 2, 6), abs=1e-10)
    assert t.prob_gt_f == pytest.approx(0.125, abs=1e-12)
    assert t.group_sizes == [3, 3, 3]


def test_anova_identical_constants():
    t = anova_oneway([[4, 4], [4, 4], [4, 4]])
    assert (t.ss_columns, t.f, t.prob_gt_f, t.degenerate) == (0, 0, 1, False)


def test_anova_zero_within_variance_flagged():
    t = anova_oneway([[1, 1, 1], [2, 2, 2]])
    assert t.f == math.inf and t.prob_gt_f == 0 and t.degenerate


def test_anova_table10_inputs():
    t = anova_from_sums(0.38985, 4, 0.00772, 10)
    assert t.ms_columns == pytest.approx(0.09746, abs=5e-6)
    assert t.ms_error == pytest.approx(0.00077, abs=5e-6)
    assert abs(t.f - 126.17) / 126.17 < 0.01
    assert 1.6346e-9 < t.prob_gt_f < 1.6346e-7
    assert t.df_total == 14
    assert t.ss_total == pytest.approx(0.39757, abs=1e-5)


@pytest.mark.parametrize("groups", [[[1, 2, 3]], [[1], [2]], [[1, 2], []]])
def test_anova_refuses_degenerate_inputs(groups):
    with pytest.raises(AnovaError):
        anova_oneway(groups)


def test_anova_unequal_group_sizes_match_scipy():
    g = [[0.1, 0.4, 0.3, 0.9], [0.5, 0.7], [0.2, 0.25, 0.3]]
    t = anova_oneway(g)
    ref = sps.f_oneway(*g)
    assert t.f == pytest.approx(ref.statistic, rel=1e-12)
    assert t.prob_gt_f == pytest.approx(ref.pvalue, rel=1e-10)


def test_anova_csv_layout():
    csv_text = anova_oneway([[1, 2, 3], [2, 3, 4], [3, 4, 5]]).to_csv().splitlines()
    assert csv_text[0] == "source,SS,df,MS,F,Prob>F"
    assert [line.split(",")[0] for line in csv_text[1:]] == ["Columns", "Error", "Total"]


group_sets = st.lists(
    st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=2, max_size=12),
    min_size=2, max_size=6,
)


def _rel(a, b, scale):
    return abs(a - b) <= 1e-9 * max(scale, 1e-300)


@settings(max_examples=200, deadline=None)
@given(group_sets)
def test_ss_decomposition(groups):
    t = anova_oneway(groups)
    flat = np.concatenate([np.asarray(g, float) for g in groups])
    ss_total_direct = float(((flat - flat.mean()) ** 2).sum())
    assert _rel(t.ss_columns + t.ss_error, ss_total_direct, ss_total_direct)
    assert t.df_total == t.df_columns + t.df_error == flat.size - 1


@settings(max_examples=100, deadline=None)
@given(group_sets, st.floats(-1e3, 1e3), st.floats(0.1, 10))
def test_shift_and_scale_invariance(groups, shift, scale):
    base = anova_oneway(groups)
    if base.ss_error < 1e-6 or base.ss_columns < 1e-6:
        return
    shifted = anova_oneway([[v + shift for v in g] for g in groups])
    assert shifted.ss_columns == pytest.approx(base.ss_columns, rel=1e-7)
    assert shifted.ss_error == pytest.approx(base.ss_error, rel=1e-7)
    scaled = anova_oneway([[v * scale for v in g] for g in groups])
    assert scaled.ss_columns == pytest.approx(base.ss_columns * scale**2, rel=1e-9)
    assert scaled.f == pytest.approx(base.f, rel=1e-9)
    assert scaled.prob_gt_f == pytest.approx(base.prob_gt_f, rel=1e-7, abs=1e-15)


def test_f_cdf_examples():
    assert f_cdf(0, 3, 7) == 0
    assert f_cdf(1, 10, 10) == pytest.approx(0.5, abs=1e-12)
    assert f_cdf(1, 10, 10) == pytest.approx(oracles.f_cdf_quadrature(1, 10, 10), abs=1e-10)
    assert 1 - f_cdf(126.17, 4, 10) == pytest.approx(1.63e-8, rel=0.05)
    assert f_sf(126.17, 4, 10) == pytest.approx(1.63e-8, rel=0.05)


@pytest.mark.parametrize("x, d1, d2", [(0.3, 1, 1), (2.5, 2, 6), (1.7, 4, 10), (5.0, 7, 3), (0.9, 30, 45), (40.0, 2, 200)])
def test_f_cdf_against_quadrature_and_scipy(x, d1, d2):
    assert f_cdf(x, d1, d2) == pytest.approx(sps.f.cdf(x, d1, d2), abs=1e-10)
    assert f_sf(x, d1, d2) == pytest.approx(sps.f.sf(x, d1, d2), rel=1e-9, abs=1e-15)
    if d1 >= 2:
        assert f_cdf(x, d1, d2) == pytest.approx(oracles.f_cdf_quadrature(x, d1, d2), abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 50), st.floats(0, 50), st.integers(1, 40), st.integers(1, 40))
def test_f_cdf_monotone(x1, x2, d1, d2):
    lo, hi = sorted((x1, x2))
    assert f_cdf(lo, d1, d2) <= f_cdf(hi, d1, d2) + 1e-15
    assert 0 <= f_cdf(hi, d1, d2) <= 1


def test_f_cdf_tends_to_one():
    assert f_cdf(1e12, 3, 5) == pytest.approx(1, abs=1e-10)
    assert f_cdf(math.inf, 3, 5) == 1


def test_f_cdf_negative_rejected():
    with pytest.raises(ValueError):
        f_cdf(-1, 2, 2)


def test_betainc_symmetry():
    for a, b, x in [(0.5, 0.5, 0.3), (2, 5, 0.1), (10, 3, 0.9)]:
        assert betainc_regularized(a, b, x) == pytest.approx(1 - betainc_regularized(b, a, 1 - x), abs=1e-14)
        assert betainc_regularized(a, b, x) == pytest.approx(sps.beta.cdf(x, a, b), abs=1e-13)


def test_boxplot_examples():
    b = boxplot_stats([1, 2, 3, 4, 5])
    assert (b.min, b.q1, b.median, b.q3, b.max, b.outliers) == (1, 2, 3, 4, 5, [])
    b = boxplot_stats([7])
    assert (b.min, b.q1, b.median, b.q3, b.max) == (7, 7, 7, 7, 7)
    b = boxplot_stats([1, 2, 3, 4, 100])
    assert b.outliers == [100] and b.max == 4
    with pytest.raises(ValueError):
        boxplot_stats([])


@settings(max_examples=500, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=40))
def test_boxplot_ordering(xs):
    b = boxplot_stats(xs)
    assert b.min <= b.q1 <= b.median <= b.q3 <= b.max
    assert len(b.outliers) < len(xs)
