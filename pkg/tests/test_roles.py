import io
import math

import numpy as np
import pytest

import naive
from conftest import make_graph, make_partition
from rolenet.errors import RolenetError
from rolenet.roles import (
    ThresholdRole,
    classify_by_thresholds,
    community_degree,
    compute_measures,
    directed_measures,
    external_stats,
    generalized_measures,
    load_features,
    original_measures,
    participation,
    save_features,
    within_module_degree,
    zscore_within_community,
)


def test_community_degree_examples():
    # node 0 -> {1 in C0, 2 in C1, 3 in C1}
    g = make_graph(4, [(0, 1), (0, 2), (0, 3)])
    p = make_partition([0, 0, 1, 1])
    assert community_degree(g, p, 0, 0, "out") == 1
    assert community_degree(g, p, 0, 1, "out") == 2
    assert community_degree(g, p, 1, 0, "in") == 1


def test_community_degree_containment_and_isolated():
    g = make_graph(4, [(0, 1), (0, 2)])
    p = make_partition([0, 0, 0, 1])
    assert community_degree(g, p, 0, 0, "out") == g.degree(0, "out")
    assert community_degree(g, p, 3, 0, "out") == 0
    assert community_degree(g, p, 3, 1, "in") == 0


def test_community_degree_bad_index():
    g = make_graph(2, [(0, 1)])
    p = make_partition([0, 0])
    with pytest.raises(IndexError):
        community_degree(g, p, 0, 5, "out")


def test_zscore_examples():
    p = make_partition([0, 0, 0])
    assert zscore_within_community([2.0, 2.0, 2.0], p).tolist() == [0.0, 0.0, 0.0]
    p2 = make_partition([0, 0])
    assert zscore_within_community([1.0, 3.0], p2).tolist() == [-1.0, 1.0]
    p3 = make_partition([0])
    assert zscore_within_community([5.0], p3).tolist() == [0.0]


def test_within_module_degree_example():
    # One community where node 0 has reciprocal links to 1 and 2, so the
    # undirected internal degrees are (4, 2, 2).
    g = make_graph(3, [(0, 1), (0, 2), (1, 0), (2, 0)])
    p = make_partition([0, 0, 0])
    z = within_module_degree(g, p, "undirected")
    # internal degrees (4, 2, 2): mu = 8/3, sigma = population std
    vals = np.array([4.0, 2.0, 2.0])
    expect = (vals - vals.mean()) / vals.std()
    assert np.allclose(z, expect, atol=1e-12)


def test_within_module_degree_multiset_1_1_4():
    z = zscore_within_community([1.0, 1.0, 4.0], make_partition([0, 0, 0]))
    assert np.allclose(z, [-1 / math.sqrt(2), -1 / math.sqrt(2), 2 / math.sqrt(2)])


def test_within_module_degree_regular_community():
    arcs = [(u, v) for u in range(3) for v in range(3) if u != v]
    g = make_graph(3, arcs)
    p = make_partition([0, 0, 0])
    assert within_module_degree(g, p, "in").tolist() == [0.0, 0.0, 0.0]


def test_participation_examples():
    # All links in one community.
    g = make_graph(3, [(0, 1), (0, 2)])
    p = make_partition([0, 0, 0])
    assert participation(g, p, "out")[0] == 0.0

    # One link per each of n communities: P = 1 - 1/n.
    n = 4
    g2 = make_graph(n + 1, [(0, i + 1) for i in range(n)])
    p2 = make_partition([0] + list(range(1, n + 1)))
    assert participation(g2, p2, "out")[0] == pytest.approx(1 - 1 / n, abs=1e-15)

    # Community degrees (2, 1, 1), d = 4 -> P = 0.625.
    g3 = make_graph(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
    p3 = make_partition([0, 0, 0, 1, 2])
    assert participation(g3, p3, "out")[0] == pytest.approx(0.625, abs=1e-15)


def test_participation_zero_degree_node():
    g = make_graph(3, [(0, 1)])
    p = make_partition([0, 0, 1])
    assert participation(g, p, "out")[2] == 0.0
    assert participation(g, p, "in")[0] == 0.0


def test_external_stats_example():
    # External out-links: 3 to C1, 1 to C2 -> eps=2, d_ext=4, delta=1.
    arcs = [(0, 1), (0, 2), (0, 3), (0, 4)]
    g = make_graph(6, arcs)
    p = make_partition([0, 1, 1, 1, 2, 0])
    d_int, d_ext, eps, delta = external_stats(g, p, "out")
    assert d_int[0] == 0
    assert d_ext[0] == 4
    assert eps[0] == 2
    assert delta[0] == pytest.approx(1.0, abs=1e-15)


def test_external_stats_no_external_links():
    g = make_graph(3, [(0, 1), (1, 0)])
    p = make_partition([0, 0, 1])
    d_int, d_ext, eps, delta = external_stats(g, p, "out")
    assert d_ext[0] == 0 and eps[0] == 0 and delta[0] == 0.0


def test_degree_decomposition_invariants(rng):
    n = 25
    arcs = naive.random_arc_set(rng, n, 0.2)
    g = make_graph(n, arcs)
    comm = naive.random_partition(rng, n, 5)
    p = make_partition(comm)
    for direction in ("in", "out"):
        d_int, d_ext, eps, delta = external_stats(g, p, direction)
        for u in range(n):
            total = sum(
                community_degree(g, p, u, i, direction)
                for i in range(p.community_count)
            )
            assert total == g.degree(u, direction)
            assert d_int[u] + d_ext[u] == g.degree(u, direction)


def test_participation_bounds(rng):
    n = 30
    arcs = naive.random_arc_set(rng, n, 0.2)
    g = make_graph(n, arcs)
    p = make_partition(naive.random_partition(rng, n, 6))
    for direction in ("in", "out", "undirected"):
        vals = participation(g, p, direction)
        assert ((vals >= 0.0) & (vals < 1.0)).all()


def test_zscore_columns_standardized(rng):
    n = 40
    arcs = naive.random_arc_set(rng, n, 0.25)
    g = make_graph(n, arcs)
    p = make_partition(naive.random_partition(rng, n, 3))
    fm = generalized_measures(g, p)
    for col in range(fm.values.shape[1]):
        for c in range(p.community_count):
            vals = fm.values[p.members(c), col]
            if np.ptp(vals) == 0.0:
                assert (vals == 0.0).all()
                continue
            assert abs(vals.mean()) < 1e-9
            assert abs(vals.std() - 1.0) < 1e-9


def test_equal_p_different_diversity():
    # Both count multisets have d = 8 and sum of squares 14, so P is the
    # same (1 - 14/64), but they reach 6 vs 5 distinct external communities.
    counts_a = [3, 1, 1, 1, 1, 1]
    counts_b = [2, 2, 2, 1, 1]

    def build(counts):
        arcs = []
        comm = [0]
        nxt = 1
        for ci, c in enumerate(counts, start=1):
            for _ in range(c):
                arcs.append((0, nxt))
                comm.append(ci)
                nxt += 1
        return make_graph(nxt, arcs), make_partition(comm)

    ga, pa = build(counts_a)
    gb, pb = build(counts_b)
    P_a = participation(ga, pa, "out")[0]
    P_b = participation(gb, pb, "out")[0]
    assert P_a == P_b
    eps_a = external_stats(ga, pa, "out")[2][0]
    eps_b = external_stats(gb, pb, "out")[2][0]
    assert eps_a != eps_b


def test_measure_sets_shapes():
    g = make_graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    p = make_partition([0, 0, 1, 1])
    assert original_measures(g, p).values.shape == (4, 2)
    assert directed_measures(g, p).values.shape == (4, 4)
    assert generalized_measures(g, p).values.shape == (4, 8)
    assert compute_measures(g, p, "generalized").tag == "generalized8"
    with pytest.raises(RolenetError):
        compute_measures(g, p, "bogus")


def test_classify_by_thresholds_paper_examples():
    assert classify_by_thresholds(3.0, 0.20) is ThresholdRole.PROVINCIAL_HUB
    assert classify_by_thresholds(2.5, 0.80) is ThresholdRole.KINLESS_HUB
    assert classify_by_thresholds(0.0, 0.0) is ThresholdRole.ULTRA_PERIPHERAL_NON_HUB


def test_classify_by_thresholds_errors():
    with pytest.raises(RolenetError):
        classify_by_thresholds(0.0, 1.5)
    with pytest.raises(RolenetError):
        classify_by_thresholds(0.0, -0.1)


def test_features_round_trip(rng):
    n = 12
    arcs = naive.random_arc_set(rng, n, 0.3)
    g = make_graph(n, arcs)
    p = make_partition(naive.random_partition(rng, n, 3))
    fm = generalized_measures(g, p)
    buf = io.StringIO()
    save_features(g, fm, buf)
    buf.seek(0)
    fm2 = load_features(g, buf)
    assert fm2.columns == fm.columns
    assert np.array_equal(fm2.values, fm.values)  # full-precision round trip
    assert fm2.tag == fm.tag
