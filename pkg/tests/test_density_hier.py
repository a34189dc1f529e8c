import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.cluster.hierarchy import fcluster, linkage

from psokmeans.dataset import make_synthetic_blobs, pairwise_distances
from psokmeans.density_hier import (
    DbscanConfig,
    HierConfig,
    Linkage,
    dbscan_run,
    hierarchical_run,
    region_query,
)
from psokmeans.partition import NOISE

from . import oracles

SEVEN = np.array([0, 0.5, 1.0, 10, 10.5, 11, 50]).reshape(-1, 1)


def test_region_query_examples():
    x = np.array([0, 0.5, 1.0, 10]).reshape(-1, 1)
    assert region_query(x, 1, 1.0) == {0, 1, 2}
    assert region_query(x, 3, 0.1) == {3}
    assert region_query(np.zeros((4, 2)), 2, 0.5) == {0, 1, 2, 3}


def test_region_query_closed_ball():
    x = np.array([[0.0], [1.0]])
    assert region_query(x, 0, 1.0) == {0, 1}


def test_region_query_bad_index():
    with pytest.raises(IndexError):
        region_query(SEVEN, 7, 1.0)


def test_dbscan_seven_points():
    p = dbscan_run(SEVEN, DbscanConfig(eps=1.0, minpts=3))
    assert p.labels.tolist() == [0, 0, 0, 1, 1, 1, NOISE]
    assert p.k == 2


def test_dbscan_minpts_one_gives_components(rng):
    x = rng.uniform(0, 10, size=(40, 2))
    eps = 1.2
    p = dbscan_run(x, DbscanConfig(eps=eps, minpts=1))
    assert p.n_noise == 0
    # Union-find over the eps graph as the oracle.
    adj = pairwise_distances(x) <= eps
    root = list(range(40))

    def find(a):
        while root[a] != a:
            a = root[a]
        return a

    for i in range(40):
        for j in range(i + 1, 40):
            if adj[i, j]:
                root[find(i)] = find(j)
    assert oracles.same_partition(p.labels.tolist(), [find(i) for i in range(40)])


def test_dbscan_all_noise():
    x = np.arange(10, dtype=float).reshape(-1, 1) * 5
    p = dbscan_run(x, DbscanConfig(eps=1.0, minpts=2))
    assert p.k == 0 and p.n_noise == 10


def test_dbscan_reference_operating_point_accepted():
    d = make_synthetic_blobs(seed=7)
    cfg = DbscanConfig(eps=25, minpts=65)
    p = dbscan_run(d, cfg)
    assert len(p) == 305


def test_dbscan_border_point_first_come():
    # x=1.9 is a border point of both clusters (reachable from 0.9 and from
    # 2.9) but not a core itself; the cluster discovered first claims it.
    x = np.array([0, 0.3, 0.6, 0.9, 1.9, 2.9, 3.2, 3.5, 3.8]).reshape(-1, 1)
    p = dbscan_run(x, DbscanConfig(eps=1.0, minpts=4))
    assert p.labels.tolist() == [0, 0, 0, 0, 0, 1, 1, 1, 1]


@pytest.mark.parametrize("bad", [dict(eps=0, minpts=3), dict(eps=1, minpts=0)])
def test_dbscan_config_validation(bad):
    with pytest.raises(ValueError):
        DbscanConfig(**bad)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 40), st.floats(0.3, 3.0), st.integers(1, 6))
def test_dbscan_core_invariants(seed, n, eps, minpts):
    x = np.random.default_rng(seed).uniform(0, 10, size=(n, 2))
    p = dbscan_run(x, DbscanConfig(eps=eps, minpts=minpts))
    adj = pairwise_distances(x) <= eps
    core = adj.sum(axis=1) >= minpts
    for c in range(p.k):
        members = p.members(c)
        assert core[members].any()
    for i in np.flatnonzero(core):
        assert p.labels[i] != NOISE
        # Core neighbors share the cluster; a border neighbor may have been
        # claimed first by another cluster, but is never noise.
        assert np.all(p.labels[adj[i] & core] == p.labels[i])
        assert np.all(p.labels[adj[i]] != NOISE)
    # Noise points are not within eps of any core point.
    for i in np.flatnonzero(p.labels == NOISE):
        assert not (adj[i] & core).any()


@pytest.mark.parametrize("link", ["single", "complete", "average"])
def test_hierarchical_small_example(link):
    x = np.array([1, 2, 9, 10], float).reshape(-1, 1)
    p = hierarchical_run(x, HierConfig(k=2, linkage=link))
    assert p.labels.tolist() == [0, 0, 1, 1]


def test_hierarchical_k_equals_n(rng):
    x = rng.normal(size=(7, 2))
    p = hierarchical_run(x, HierConfig(k=7))
    assert p.labels.tolist() == list(range(7))


def test_hierarchical_k_exceeds_n():
    with pytest.raises(ValueError, match="exceeds"):
        hierarchical_run([[0.0]], HierConfig(k=2))


def test_hierarchical_default_linkage_average():
    assert HierConfig(k=2).linkage is Linkage.AVERAGE


def test_hierarchical_tie_break_smallest_pair():
    # Equal gaps everywhere: the first merge is (0, 1), then (0-1, 2), ...
    x = np.arange(5, dtype=float).reshape(-1, 1)
    p = hierarchical_run(x, HierConfig(k=4, linkage="single"))
    assert p.labels.tolist() == [0, 0, 1, 2, 3]
    p = hierarchical_run(x, HierConfig(k=2, linkage="single"))
    assert p.labels.tolist() == [0, 0, 0, 0, 1]


@pytest.mark.parametrize("trial", range(50))
def test_single_linkage_matches_mst_oracle(trial):
    rng = np.random.default_rng(1000 + trial)
    n = int(rng.integers(2, 31))
    k = int(rng.integers(1, n + 1))
    x = rng.normal(size=(n, int(rng.integers(1, 4))))
    p = hierarchical_run(x, HierConfig(k=k, linkage="single"))
    assert oracles.same_partition(p.labels.tolist(), oracles.mst_components(x.tolist(), k))


@pytest.mark.parametrize("link", ["single", "complete", "average"])
@pytest.mark.parametrize("seed", range(5))
def test_hierarchical_agrees_with_scipy(link, seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(25, 3))
    k = 4
    ours = hierarchical_run(x, HierConfig(k=k, linkage=link))
    ref = fcluster(linkage(x, method=link), t=k, criterion="maxclust")
    assert oracles.same_partition(ours.labels.tolist(), ref.tolist())


def test_deterministic(wine):
    a = hierarchical_run(wine, HierConfig(k=3))
    b = hierarchical_run(wine, HierConfig(k=3))
    np.testing.assert_array_equal(a.labels, b.labels)
    c = dbscan_run(wine, DbscanConfig(eps=40, minpts=5))
    e = dbscan_run(wine, DbscanConfig(eps=40, minpts=5))
    np.testing.assert_array_equal(c.labels, e.labels)
