"""Immutable directed graph stored as dual CSR adjacency.

The graph keeps both outgoing and incoming adjacency so that degree and
neighborhood queries are O(1)/O(deg) in either direction.  Node labels from
the input edge list are mapped to dense 0-based indices; the mapping is kept
so that every exported artifact can show the original labels.

Dense indices are assigned in lexicographic label order, which makes the
structure independent of the input line order.
"""

from __future__ import annotations

import io
import logging
import os
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import EdgeListParseError, RolenetError

logger = logging.getLogger(__name__)

IN = "in"
OUT = "out"

_CACHE_MAGIC = b"RLNETGR1"

COMMENT_PREFIXES = ("#", "%")


@dataclass(frozen=True)
class EdgeListFormat:
    """Text edge-list dialect: one arc per line ``SRC<ws>DST``."""

    comment_prefixes: tuple[str, ...] = COMMENT_PREFIXES


@dataclass(frozen=True)
class DirectedGraph:
    """Simple directed graph (no self-loops, no duplicate arcs).

    Attributes:
        node_count: number of nodes (dense indices 0..node_count-1)
        arc_count: number of arcs
        out_indptr/out_indices: CSR of successors, each row sorted ascending
        in_indptr/in_indices: CSR of predecessors, each row sorted ascending
        labels: dense index -> original label (lexicographically sorted)
    """

    node_count: int
    arc_count: int
    out_indptr: np.ndarray
    out_indices: np.ndarray
    in_indptr: np.ndarray
    in_indices: np.ndarray
    labels: np.ndarray = field(repr=False)

    def successors(self, u: int) -> np.ndarray:
        self._check_node(u)
        return self.out_indices[self.out_indptr[u]:self.out_indptr[u + 1]]

    def predecessors(self, u: int) -> np.ndarray:
        self._check_node(u)
        return self.in_indices[self.in_indptr[u]:self.in_indptr[u + 1]]

    def degree(self, u: int, direction: str = OUT) -> int:
        """Number of incoming or outgoing arcs at node ``u``."""
        self._check_node(u)
        if direction == OUT:
            return int(self.out_indptr[u + 1] - self.out_indptr[u])
        if direction == IN:
            return int(self.in_indptr[u + 1] - self.in_indptr[u])
        raise ValueError(f"unknown direction {direction!r}")

    def out_degrees(self) -> np.ndarray:
        return np.diff(self.out_indptr)

    def in_degrees(self) -> np.ndarray:
        return np.diff(self.in_indptr)

    def index_of(self, label: str) -> int:
        i = int(np.searchsorted(self.labels, label))
        if i >= self.node_count or self.labels[i] != label:
            raise KeyError(label)
        return i

    def label_of(self, u: int) -> str:
        self._check_node(u)
        return str(self.labels[u])

    def arcs(self):
        """Yield all arcs as (src_index, dst_index), ordered by (src, dst)."""
        for u in range(self.node_count):
            for v in self.successors(u):
                yield u, int(v)

    def arc_array(self) -> tuple[np.ndarray, np.ndarray]:
        """All arcs as parallel (src, dst) index arrays, ordered by (src, dst)."""
        src = np.repeat(np.arange(self.node_count, dtype=np.int64), self.out_degrees())
        return src, self.out_indices.copy()

    def _check_node(self, u: int) -> None:
        if not 0 <= u < self.node_count:
            raise IndexError(f"node index {u} out of range [0, {self.node_count})")


def ingest_edge_list(source, fmt: EdgeListFormat | None = None) -> DirectedGraph:
    """Build a DirectedGraph from an edge-list line stream.

    ``source`` may be a path, an open text file, or any iterable of lines.
    Duplicate arcs are collapsed and self-loops dropped; both removals are
    logged with counts.  Raises EdgeListParseError on malformed lines and
    RolenetError on empty input.
    """
    fmt = fmt or EdgeListFormat()
    close = False
    if isinstance(source, (str, os.PathLike)):
        source = open(source, "r", encoding="utf-8")
        close = True
    try:
        src_labels: list[str] = []
        dst_labels: list[str] = []
        for lineno, line in enumerate(source, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith(fmt.comment_prefixes):
                continue
            parts = stripped.split()
            if len(parts) != 2:
                raise EdgeListParseError(
                    f"expected 'SRC DST', got {stripped!r}", line_number=lineno
                )
            src_labels.append(parts[0])
            dst_labels.append(parts[1])
    finally:
        if close:
            source.close()

    if not src_labels:
        raise RolenetError("empty edge list: no arcs found")

    labels, codes = np.unique(np.array(src_labels + dst_labels, dtype=object), return_inverse=True)
    n_raw = len(src_labels)
    src = codes[:n_raw].astype(np.int64)
    dst = codes[n_raw:].astype(np.int64)
    return _from_arc_arrays(labels, src, dst, log_removed=True)


def from_arcs(labeled_arcs) -> DirectedGraph:
    """Build a graph from an iterable of (src_label, dst_label) pairs."""
    pairs = [(str(a), str(b)) for a, b in labeled_arcs]
    if not pairs:
        raise RolenetError("empty arc list")
    flat = np.array([p[0] for p in pairs] + [p[1] for p in pairs], dtype=object)
    labels, codes = np.unique(flat, return_inverse=True)
    n = len(pairs)
    return _from_arc_arrays(labels, codes[:n].astype(np.int64), codes[n:].astype(np.int64))


def _from_arc_arrays(
    labels: np.ndarray, src: np.ndarray, dst: np.ndarray, log_removed: bool = False
) -> DirectedGraph:
    n = len(labels)
    loops = src == dst
    n_loops = int(loops.sum())
    if n_loops:
        src, dst = src[~loops], dst[~loops]
    # Encode (src, dst) into one key so dedup + (src, dst) sort is a single unique().
    keys = np.unique(src * np.int64(n) + dst)
    n_dups = len(src) - len(keys)
    if log_removed and (n_loops or n_dups):
        logger.info(
            "ingestion removed %d self-loop(s) and %d duplicate arc(s)", n_loops, n_dups
        )
    src = keys // n
    dst = keys % n
    m = len(keys)

    out_indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=out_indptr[1:])
    out_indices = dst.astype(np.int64)

    order = np.lexsort((src, dst))
    in_indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(dst, minlength=n), out=in_indptr[1:])
    in_indices = src[order].astype(np.int64)

    return DirectedGraph(
        node_count=n,
        arc_count=m,
        out_indptr=out_indptr,
        out_indices=out_indices,
        in_indptr=in_indptr,
        in_indices=in_indices,
        labels=labels,
    )


def write_edge_list(g: DirectedGraph, sink) -> None:
    """Write all arcs in the standard text format, ordered by (src, dst)."""
    close = False
    if isinstance(sink, (str, os.PathLike)):
        sink = open(sink, "w", encoding="utf-8")
        close = True
    try:
        for u, v in g.arcs():
            sink.write(f"{g.labels[u]} {g.labels[v]}\n")
    finally:
        if close:
            sink.close()


def save_cache(g: DirectedGraph, path) -> None:
    """Write the versioned binary cache (deterministic bytes)."""
    label_blob = "\n".join(str(x) for x in g.labels).encode("utf-8")
    with open(path, "wb") as f:
        f.write(_CACHE_MAGIC)
        f.write(struct.pack("<QQQ", g.node_count, g.arc_count, len(label_blob)))
        f.write(label_blob)
        for arr in (g.out_indptr, g.out_indices, g.in_indptr, g.in_indices):
            f.write(np.ascontiguousarray(arr, dtype=np.int64).tobytes())


def load_cache(path) -> DirectedGraph:
    with open(path, "rb") as f:
        magic = f.read(len(_CACHE_MAGIC))
        if magic != _CACHE_MAGIC:
            raise RolenetError(f"{path}: not a graph cache file (bad magic)")
        n, m, blob_len = struct.unpack("<QQQ", f.read(24))
        labels = np.array(f.read(blob_len).decode("utf-8").split("\n"), dtype=object)
        if len(labels) != n:
            raise RolenetError(f"{path}: corrupt cache (label count mismatch)")

        def read_arr(count):
            return np.frombuffer(f.read(8 * count), dtype=np.int64).copy()

        out_indptr = read_arr(n + 1)
        out_indices = read_arr(m)
        in_indptr = read_arr(n + 1)
        in_indices = read_arr(m)
    return DirectedGraph(
        node_count=int(n),
        arc_count=int(m),
        out_indptr=out_indptr,
        out_indices=out_indices,
        in_indptr=in_indptr,
        in_indices=in_indices,
        labels=labels,
    )


def ingest_string(text: str) -> DirectedGraph:
    """Convenience wrapper: ingest an edge list held in a string."""
    return ingest_edge_list(io.StringIO(text))
