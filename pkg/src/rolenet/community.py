"""Directed modularity and Louvain-style community detection.

Modularity follows the directed (out-degree x in-degree null model) form
Q = sum_c [ e_c/m - (Dout_c * Din_c) / m^2 ].  The Louvain optimizer runs
greedy local moves against this objective, then aggregates communities into
a weighted meta-graph and repeats; the weighted meta-graph never escapes
this module.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from ._backend import get_backend
from .errors import RolenetError
from .graph import DirectedGraph

__all__ = [
    "Partition",
    "LouvainConfig",
    "directed_modularity",
    "louvain",
    "save_partition",
    "load_partition",
]


@dataclass(frozen=True)
class Partition:
    """Disjoint community structure over dense node indices.

    Community indices are contiguous 0..community_count-1 with no empty
    community.
    """

    assignment: np.ndarray = field(repr=False)
    community_count: int
    community_sizes: np.ndarray = field(repr=False)

    @classmethod
    def from_assignment(cls, assignment) -> "Partition":
        """Build a partition, relabeling community ids to be contiguous."""
        assignment = np.asarray(assignment, dtype=np.int64)
        if assignment.ndim != 1 or assignment.size == 0:
            raise RolenetError("assignment must be a non-empty 1-d array")
        _, dense = np.unique(assignment, return_inverse=True)
        dense = dense.astype(np.int64)
        sizes = np.bincount(dense)
        return cls(
            assignment=dense,
            community_count=int(sizes.size),
            community_sizes=sizes.astype(np.int64),
        )

    @property
    def node_count(self) -> int:
        return int(self.assignment.size)

    def members(self, c: int) -> np.ndarray:
        if not 0 <= c < self.community_count:
            raise IndexError(f"community index {c} out of range")
        return np.flatnonzero(self.assignment == c)

    def community_of(self, u: int) -> int:
        return int(self.assignment[u])


@dataclass(frozen=True)
class LouvainConfig:
    seed: int = 0
    min_phase_gain: float = 1e-9


@dataclass
class LouvainStats:
    """Per-phase bookkeeping, exposed for verification."""

    q_incremental: list = field(default_factory=list)
    q_scratch: list = field(default_factory=list)
    levels: int = 0


def directed_modularity(g: DirectedGraph, p: Partition) -> float:
    """Leicht-Newman directed modularity of a partition, in [-1, 1]."""
    if g.arc_count == 0:
        raise RolenetError("modularity is undefined on an empty graph")
    if p.node_count != g.node_count:
        raise RolenetError(
            f"partition covers {p.node_count} nodes, graph has {g.node_count}"
        )
    src, dst = g.arc_array()
    comm = p.assignment
    m = float(g.arc_count)
    e_intra = float(np.count_nonzero(comm[src] == comm[dst]))
    d_out = np.bincount(comm, weights=g.out_degrees(), minlength=p.community_count)
    d_in = np.bincount(comm, weights=g.in_degrees(), minlength=p.community_count)
    return e_intra / m - float(d_out @ d_in) / (m * m)


def louvain(g: DirectedGraph, cfg: LouvainConfig | None = None) -> Partition:
    """Greedy directed-modularity optimization, deterministic given cfg.seed."""
    partition, _ = louvain_with_stats(g, cfg)
    return partition


def louvain_with_stats(
    g: DirectedGraph, cfg: LouvainConfig | None = None, backend: str | None = None
) -> tuple[Partition, LouvainStats]:
    cfg = cfg or LouvainConfig()
    if g.arc_count == 0:
        raise RolenetError("louvain requires at least one arc")
    kern = get_backend(backend)
    rng = np.random.default_rng(cfg.seed)
    m = float(g.arc_count)
    inv_m = 1.0 / m

    # Level graph: weighted dual-CSR copy of the input (weights start at 1).
    out_indptr = g.out_indptr.copy()
    out_indices = g.out_indices.copy()
    out_weights = np.ones(g.arc_count, dtype=np.float64)
    in_indptr = g.in_indptr.copy()
    in_indices = g.in_indices.copy()
    in_weights = np.ones(g.arc_count, dtype=np.float64)

    node_to_comm = np.arange(g.node_count, dtype=np.int64)
    stats = LouvainStats()
    q_running = _weighted_q(
        out_indptr, out_indices, out_weights,
        np.arange(g.node_count, dtype=np.int64), m,
    )
    q_prev = q_running

    while True:
        n_level = len(out_indptr) - 1
        comm = np.arange(n_level, dtype=np.int64)
        tot_out = _node_strength(out_indptr, out_weights)
        tot_in = _node_strength(in_indptr, in_weights)

        while True:
            order = rng.permutation(n_level).astype(np.int64)
            moves, gain = kern.local_move(
                out_indptr, out_indices, out_weights,
                in_indptr, in_indices, in_weights,
                comm, order, tot_out, tot_in, inv_m,
            )
            q_running += gain
            if moves == 0:
                break

        _, comm = np.unique(comm, return_inverse=True)
        comm = comm.astype(np.int64)
        q_scratch = _weighted_q(out_indptr, out_indices, out_weights, comm, m)
        stats.levels += 1
        stats.q_incremental.append(q_running)
        stats.q_scratch.append(q_scratch)

        if q_scratch - q_prev <= cfg.min_phase_gain:
            node_to_comm = comm[node_to_comm]
            break
        q_prev = q_scratch
        node_to_comm = comm[node_to_comm]
        n_comm = int(comm.max()) + 1
        if n_comm == n_level:
            break
        (out_indptr, out_indices, out_weights,
         in_indptr, in_indices, in_weights) = _aggregate(
            out_indptr, out_indices, out_weights, comm, n_comm
        )

    return Partition.from_assignment(node_to_comm), stats


def _node_strength(indptr: np.ndarray, weights: np.ndarray) -> np.ndarray:
    # Row sums via cumsum (reduceat misbehaves on empty rows).
    csum = np.concatenate(([0.0], np.cumsum(weights)))
    return csum[indptr[1:]] - csum[indptr[:-1]]


def _weighted_q(indptr, indices, weights, comm, m) -> float:
    n = len(indptr) - 1
    src = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    intra = comm[src] == comm[indices]
    e_intra = float(weights[intra].sum())
    kout = _node_strength(indptr, weights)
    # In-strength per node equals column sums of the weight matrix.
    kin = np.bincount(indices, weights=weights, minlength=n)
    n_comm = int(comm.max()) + 1
    d_out = np.bincount(comm, weights=kout, minlength=n_comm)
    d_in = np.bincount(comm, weights=kin, minlength=n_comm)
    return e_intra / m - float(d_out @ d_in) / (m * m)


def _aggregate(out_indptr, out_indices, out_weights, comm, n_comm):
    """Collapse communities into a weighted meta-graph (self-loops kept)."""
    n = len(out_indptr) - 1
    src = np.repeat(np.arange(n, dtype=np.int64), np.diff(out_indptr))
    cs = comm[src]
    cd = comm[out_indices]
    key = cs * np.int64(n_comm) + cd
    uniq, inverse = np.unique(key, return_inverse=True)
    w = np.bincount(inverse, weights=out_weights)
    new_src = (uniq // n_comm).astype(np.int64)
    new_dst = (uniq % n_comm).astype(np.int64)

    out_indptr2 = np.zeros(n_comm + 1, dtype=np.int64)
    np.cumsum(np.bincount(new_src, minlength=n_comm), out=out_indptr2[1:])
    out_indices2 = new_dst
    out_weights2 = w

    order = np.lexsort((new_src, new_dst))
    in_indptr2 = np.zeros(n_comm + 1, dtype=np.int64)
    np.cumsum(np.bincount(new_dst, minlength=n_comm), out=in_indptr2[1:])
    in_indices2 = new_src[order]
    in_weights2 = w[order]

    return (out_indptr2, out_indices2, out_weights2,
            in_indptr2, in_indices2, in_weights2)


def save_partition(g: DirectedGraph, p: Partition, sink) -> None:
    """Write 'node_label<TAB>community_index' lines, one per node."""
    close = False
    if isinstance(sink, (str, os.PathLike)):
        sink = open(sink, "w", encoding="utf-8")
        close = True
    try:
        for u in range(g.node_count):
            sink.write(f"{g.labels[u]}\t{p.assignment[u]}\n")
    finally:
        if close:
            sink.close()


def load_partition(g: DirectedGraph, source) -> Partition:
    """Read a partition written by :func:`save_partition`."""
    close = False
    if isinstance(source, (str, os.PathLike)):
        source = open(source, "r", encoding="utf-8")
        close = True
    assignment = np.full(g.node_count, -1, dtype=np.int64)
    try:
        for lineno, line in enumerate(source, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                label, comm = line.split("\t")
                assignment[g.index_of(label)] = int(comm)
            except (ValueError, KeyError) as exc:
                raise RolenetError(f"partition line {lineno}: {exc}") from exc
    finally:
        if close:
            source.close()
    if (assignment < 0).any():
        missing = int((assignment < 0).sum())
        raise RolenetError(f"partition is missing {missing} node(s)")
    return Partition.from_assignment(assignment)
