"""Pure-Python (numpy) kernels: fallback backend for the hot inner loops.

The compiled backend in ``_speedups.pyx`` implements the same three entry
points with identical numerics; the arithmetic here is ordered so that both
backends produce bitwise-equal results.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND_NAME = "python"


def local_move(
    out_indptr,
    out_indices,
    out_weights,
    in_indptr,
    in_indices,
    in_weights,
    comm,
    order,
    tot_out,
    tot_in,
    inv_m,
):
    """One greedy sweep of directed-modularity local moves.

    Visits nodes in ``order``; ``comm``, ``tot_out`` and ``tot_in`` are
    updated in place.  Returns (number of accepted moves, summed modularity
    gain of the accepted moves).
    """
    moves = 0
    gain_sum = 0.0
    inv_m2 = inv_m * inv_m
    for u in order:
        u = int(u)
        c0 = int(comm[u])
        kout = 0.0
        kin = 0.0
        # Accumulate arc weight towards each neighboring community, in
        # adjacency-scan encounter order (dict preserves insertion order).
        w_uc: dict[int, float] = {}
        for j in range(out_indptr[u], out_indptr[u + 1]):
            v = int(out_indices[j])
            w = float(out_weights[j])
            kout += w
            if v != u:
                c = int(comm[v])
                w_uc[c] = w_uc.get(c, 0.0) + w
        for j in range(in_indptr[u], in_indptr[u + 1]):
            v = int(in_indices[j])
            w = float(in_weights[j])
            kin += w
            if v != u:
                c = int(comm[v])
                w_uc[c] = w_uc.get(c, 0.0) + w

        tot_out[c0] -= kout
        tot_in[c0] -= kin

        stay_gain = w_uc.get(c0, 0.0) * inv_m - (
            kout * tot_in[c0] + kin * tot_out[c0]
        ) * inv_m2
        best_c = c0
        best_gain = stay_gain
        for c, w in w_uc.items():
            if c == c0:
                continue
            gain = w * inv_m - (kout * tot_in[c] + kin * tot_out[c]) * inv_m2
            if gain > best_gain:
                best_gain = gain
                best_c = c

        tot_out[best_c] += kout
        tot_in[best_c] += kin
        if best_c != c0:
            comm[u] = best_c
            moves += 1
            gain_sum += best_gain - stay_gain
    return moves, gain_sum


def role_stats(indptr, indices, comm, n_comm):
    """Per-node community-connectivity statistics for one link direction.

    Returns (d_int, d_ext, eps, delta, sumsq) where, for each node: d_int is
    the count of links into the node's own community, d_ext the count of
    links to other communities, eps the number of distinct external
    communities reached, delta the population standard deviation of the
    per-external-community link counts (0 when eps <= 1), and sumsq the sum
    of squared per-community link counts over all communities.
    """
    n = len(indptr) - 1
    deg = np.diff(indptr)
    src = np.repeat(np.arange(n, dtype=np.int64), deg)
    neigh_c = comm[indices].astype(np.int64)
    key = src * np.int64(n_comm) + neigh_c
    uniq, counts = np.unique(key, return_counts=True)
    ks = uniq // n_comm
    kc = uniq % n_comm
    internal = kc == comm[ks]

    d_int = np.bincount(ks[internal], weights=counts[internal], minlength=n)
    d_int = np.rint(d_int).astype(np.int64)
    d_ext = deg.astype(np.int64) - d_int
    eps = np.bincount(ks[~internal], minlength=n).astype(np.int64)
    sumsq = np.rint(
        np.bincount(ks, weights=counts.astype(np.float64) ** 2, minlength=n)
    ).astype(np.int64)

    delta = np.zeros(n, dtype=np.float64)
    multi = eps > 1
    if multi.any():
        sumsq_ext = (sumsq[multi] - d_int[multi] ** 2).astype(np.float64)
        e = eps[multi].astype(np.float64)
        mean = d_ext[multi].astype(np.float64) / e
        var = sumsq_ext / e - mean * mean
        delta[multi] = np.sqrt(np.maximum(var, 0.0))
    return d_int, d_ext, eps, delta, sumsq


def overlap_counts(out_indptr, out_indices, in_indptr, in_indices, nodes):
    """|N_in(u) & N_out(u)| for each node in ``nodes`` (rows are sorted)."""
    result = np.empty(len(nodes), dtype=np.int64)
    for i, u in enumerate(nodes):
        u = int(u)
        outs = out_indices[out_indptr[u]:out_indptr[u + 1]]
        ins = in_indices[in_indptr[u]:in_indptr[u + 1]]
        result[i] = np.intersect1d(outs, ins, assume_unique=True).size
    return result
