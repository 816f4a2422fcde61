# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the hot inner loops.

Mirrors the signatures and arithmetic of ``_kernels_py`` exactly: the same
accumulation order is used everywhere, so results are bitwise-identical to
the pure backend.
"""

from libc.math cimport sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "cython"


def local_move(
    cnp.int64_t[::1] out_indptr,
    cnp.int64_t[::1] out_indices,
    cnp.float64_t[::1] out_weights,
    cnp.int64_t[::1] in_indptr,
    cnp.int64_t[::1] in_indices,
    cnp.float64_t[::1] in_weights,
    cnp.int64_t[::1] comm,
    cnp.int64_t[::1] order,
    cnp.float64_t[::1] tot_out,
    cnp.float64_t[::1] tot_in,
    double inv_m,
):
    cdef Py_ssize_t n = out_indptr.shape[0] - 1
    cdef cnp.float64_t[::1] w_uc = np.zeros(n, dtype=np.float64)
    cdef cnp.int64_t[::1] touched = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t i, j, u, v, c, c0, best_c, n_touched, t
    cdef double kout, kin, w, stay_gain, best_gain, gain, gain_sum
    cdef double inv_m2 = inv_m * inv_m
    cdef long moves = 0

    gain_sum = 0.0
    for i in range(order.shape[0]):
        u = order[i]
        c0 = comm[u]
        kout = 0.0
        kin = 0.0
        n_touched = 0
        for j in range(out_indptr[u], out_indptr[u + 1]):
            v = out_indices[j]
            w = out_weights[j]
            kout += w
            if v != u:
                c = comm[v]
                if w_uc[c] == 0.0:
                    touched[n_touched] = c
                    n_touched += 1
                w_uc[c] += w
        for j in range(in_indptr[u], in_indptr[u + 1]):
            v = in_indices[j]
            w = in_weights[j]
            kin += w
            if v != u:
                c = comm[v]
                if w_uc[c] == 0.0:
                    touched[n_touched] = c
                    n_touched += 1
                w_uc[c] += w

        tot_out[c0] -= kout
        tot_in[c0] -= kin

        stay_gain = w_uc[c0] * inv_m - (kout * tot_in[c0] + kin * tot_out[c0]) * inv_m2
        best_c = c0
        best_gain = stay_gain
        for t in range(n_touched):
            c = touched[t]
            if c == c0:
                continue
            gain = w_uc[c] * inv_m - (kout * tot_in[c] + kin * tot_out[c]) * inv_m2
            if gain > best_gain:
                best_gain = gain
                best_c = c

        tot_out[best_c] += kout
        tot_in[best_c] += kin
        if best_c != c0:
            comm[u] = best_c
            moves += 1
            gain_sum += best_gain - stay_gain

        for t in range(n_touched):
            w_uc[touched[t]] = 0.0
    return moves, gain_sum


def role_stats(
    cnp.int64_t[::1] indptr,
    cnp.int64_t[::1] indices,
    cnp.int64_t[::1] comm,
    long n_comm,
):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    d_int_arr = np.zeros(n, dtype=np.int64)
    d_ext_arr = np.zeros(n, dtype=np.int64)
    eps_arr = np.zeros(n, dtype=np.int64)
    delta_arr = np.zeros(n, dtype=np.float64)
    sumsq_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] d_int = d_int_arr
    cdef cnp.int64_t[::1] d_ext = d_ext_arr
    cdef cnp.int64_t[::1] eps = eps_arr
    cdef cnp.float64_t[::1] delta = delta_arr
    cdef cnp.int64_t[::1] sumsq = sumsq_arr

    cdef cnp.int64_t[::1] counts = np.zeros(n_comm, dtype=np.int64)
    cdef cnp.int64_t[::1] touched = np.empty(n_comm, dtype=np.int64)
    cdef Py_ssize_t u, j, t, n_touched
    cdef cnp.int64_t c, c0, cnt, di, de, ssq, ssq_ext, e
    cdef double mean, var

    for u in range(n):
        c0 = comm[u]
        n_touched = 0
        for j in range(indptr[u], indptr[u + 1]):
            c = comm[indices[j]]
            if counts[c] == 0:
                touched[n_touched] = c
                n_touched += 1
            counts[c] += 1

        di = 0
        de = 0
        e = 0
        ssq = 0
        for t in range(n_touched):
            c = touched[t]
            cnt = counts[c]
            ssq += cnt * cnt
            if c == c0:
                di = cnt
            else:
                de += cnt
                e += 1
            counts[c] = 0

        d_int[u] = di
        d_ext[u] = de
        eps[u] = e
        sumsq[u] = ssq
        if e > 1:
            ssq_ext = ssq - di * di
            mean = (<double> de) / (<double> e)
            var = (<double> ssq_ext) / (<double> e) - mean * mean
            if var < 0.0:
                var = 0.0
            delta[u] = sqrt(var)
    return d_int_arr, d_ext_arr, eps_arr, delta_arr, sumsq_arr


def overlap_counts(
    cnp.int64_t[::1] out_indptr,
    cnp.int64_t[::1] out_indices,
    cnp.int64_t[::1] in_indptr,
    cnp.int64_t[::1] in_indices,
    cnp.int64_t[::1] nodes,
):
    result_arr = np.empty(nodes.shape[0], dtype=np.int64)
    cdef cnp.int64_t[::1] result = result_arr
    cdef Py_ssize_t i, a, b, a_end, b_end, u
    cdef cnp.int64_t x, y, hits

    for i in range(nodes.shape[0]):
        u = nodes[i]
        a = out_indptr[u]
        a_end = out_indptr[u + 1]
        b = in_indptr[u]
        b_end = in_indptr[u + 1]
        hits = 0
        while a < a_end and b < b_end:
            x = out_indices[a]
            y = in_indices[b]
            if x == y:
                hits += 1
                a += 1
                b += 1
            elif x < y:
                a += 1
            else:
                b += 1
        result[i] = hits
    return result_arr
