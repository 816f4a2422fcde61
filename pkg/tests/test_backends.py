"""The compiled and pure-Python kernel backends must agree bitwise."""

import numpy as np
import pytest

import naive
from conftest import make_graph, make_partition
from rolenet import _backend
from rolenet.community import LouvainConfig, louvain_with_stats

try:
    cython_kern = _backend.get_backend("cython")
    HAVE_CYTHON = cython_kern.BACKEND_NAME == "cython"
except Exception:
    HAVE_CYTHON = False

pytestmark = pytest.mark.skipif(not HAVE_CYTHON,
                                reason="compiled backend not built")


def random_instance(rng, n=40, p=0.15):
    arcs = naive.random_arc_set(rng, n, p)
    return make_graph(n, arcs)


def test_role_stats_bitwise_equal(rng):
    py = _backend.get_backend("python")
    cy = _backend.get_backend("cython")
    for _ in range(10):
        g = random_instance(rng)
        comm = np.asarray(naive.random_partition(rng, g.node_count, 5),
                          dtype=np.int64)
        n_comm = int(comm.max()) + 1
        for indptr, indices in ((g.out_indptr, g.out_indices),
                                (g.in_indptr, g.in_indices)):
            out_py = py.role_stats(indptr, indices, comm, n_comm)
            out_cy = cy.role_stats(indptr, indices, comm, n_comm)
            for a, b in zip(out_py, out_cy):
                assert np.array_equal(np.asarray(a), np.asarray(b))


def test_overlap_counts_bitwise_equal(rng):
    py = _backend.get_backend("python")
    cy = _backend.get_backend("cython")
    for _ in range(10):
        g = random_instance(rng, p=0.3)
        nodes = np.arange(g.node_count, dtype=np.int64)
        a = py.overlap_counts(g.out_indptr, g.out_indices,
                              g.in_indptr, g.in_indices, nodes)
        b = cy.overlap_counts(g.out_indptr, g.out_indices,
                              g.in_indptr, g.in_indices, nodes)
        assert np.array_equal(np.asarray(a), np.asarray(b))


def test_louvain_identical_across_backends(rng):
    for seed in range(5):
        g = random_instance(rng, n=50, p=0.12)
        p_py, s_py = louvain_with_stats(g, LouvainConfig(seed=seed),
                                        backend="python")
        p_cy, s_cy = louvain_with_stats(g, LouvainConfig(seed=seed),
                                        backend="cython")
        assert np.array_equal(p_py.assignment, p_cy.assignment)
        assert s_py.q_incremental == s_cy.q_incremental
        assert s_py.q_scratch == s_cy.q_scratch
