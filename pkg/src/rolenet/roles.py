"""Community-role measures.

Three measure sets over a (graph, partition) pair:

* original pair: within-module degree z and participation coefficient P,
  computed over the union of incoming and outgoing links;
* directed variants: z_in, z_out, P_in, P_out;
* generalized set: per direction, internal intensity (z-score of internal
  degree), external intensity (z-score of external degree), diversity
  (z-score of the number of distinct external communities reached) and
  heterogeneity (z-score of the spread of per-external-community link
  counts).

All z-scores are taken within the node's community using the population
standard deviation; a degenerate community (sigma = 0) scores 0.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ._backend import get_backend
from .community import Partition
from .errors import RolenetError
from .graph import IN, OUT, DirectedGraph

UNDIRECTED = "undirected"

ORIGINAL2 = "original2"
DIRECTED4 = "directed4"
GENERALIZED8 = "generalized8"

MEASURE_COLUMNS = {
    ORIGINAL2: ["z", "P"],
    DIRECTED4: ["z_in", "z_out", "P_in", "P_out"],
    GENERALIZED8: [
        "I_int_in", "I_int_out", "I_ext_in", "I_ext_out",
        "D_in", "D_out", "H_in", "H_out",
    ],
}


@dataclass(frozen=True)
class FeatureMatrix:
    """Per-node numeric measure vectors with column metadata."""

    columns: tuple
    values: np.ndarray = field(repr=False)
    tag: str = ""

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.columns.index(name)]


class ThresholdRole(Enum):
    ULTRA_PERIPHERAL_NON_HUB = "ultra-peripheral non-hub"
    PERIPHERAL_NON_HUB = "peripheral non-hub"
    CONNECTOR_NON_HUB = "connector non-hub"
    KINLESS_NON_HUB = "kinless non-hub"
    PROVINCIAL_HUB = "provincial hub"
    CONNECTOR_HUB = "connector hub"
    KINLESS_HUB = "kinless hub"


def _direction_stats(g: DirectedGraph, p: Partition, direction: str):
    """Kernel statistics (d_int, d_ext, eps, delta, sumsq) for a direction."""
    kern = get_backend()
    if direction == OUT:
        return kern.role_stats(g.out_indptr, g.out_indices, p.assignment,
                               p.community_count)
    if direction == IN:
        return kern.role_stats(g.in_indptr, g.in_indices, p.assignment,
                               p.community_count)
    if direction == UNDIRECTED:
        indptr, indices = _combined_adjacency(g)
        return kern.role_stats(indptr, indices, p.assignment, p.community_count)
    raise ValueError(f"unknown direction {direction!r}")


def _combined_adjacency(g: DirectedGraph):
    """Concatenate out- and in-rows per node (each arc counted once per end)."""
    out_deg = g.out_degrees()
    in_deg = g.in_degrees()
    indptr = np.zeros(g.node_count + 1, dtype=np.int64)
    np.cumsum(out_deg + in_deg, out=indptr[1:])
    indices = np.empty(2 * g.arc_count, dtype=np.int64)
    indices[_spans(indptr[:-1], out_deg)] = g.out_indices
    indices[_spans(indptr[:-1] + out_deg, in_deg)] = g.in_indices
    return indptr, indices


def _spans(starts, lengths):
    total = int(lengths.sum())
    base = np.repeat(starts, lengths)
    row_start = np.repeat(np.concatenate(([0], np.cumsum(lengths)[:-1])), lengths)
    return base + (np.arange(total, dtype=np.int64) - row_start)


def community_degree(
    g: DirectedGraph, p: Partition, u: int, i: int, direction: str = OUT
) -> int:
    """Number of u's links (in the given direction) into community i."""
    if not 0 <= i < p.community_count:
        raise IndexError(f"community index {i} out of range")
    if direction == OUT:
        neigh = g.successors(u)
    elif direction == IN:
        neigh = g.predecessors(u)
    elif direction == UNDIRECTED:
        neigh = np.concatenate([g.successors(u), g.predecessors(u)])
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return int(np.count_nonzero(p.assignment[neigh] == i))


def zscore_within_community(values, p: Partition) -> np.ndarray:
    """Z-score each value against its own community (population sigma).

    Communities with zero spread (uniform values, singletons) score 0.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (p.node_count,):
        raise RolenetError("values must have one entry per node")
    comm = p.assignment
    sizes = p.community_sizes.astype(np.float64)
    mean = np.bincount(comm, weights=values, minlength=p.community_count) / sizes
    sq = np.bincount(comm, weights=values * values, minlength=p.community_count) / sizes
    var = np.maximum(sq - mean * mean, 0.0)
    sigma = np.sqrt(var)
    z = np.zeros_like(values)
    ok = sigma[comm] > 0.0
    z[ok] = (values[ok] - mean[comm][ok]) / sigma[comm][ok]
    return z


def within_module_degree(g: DirectedGraph, p: Partition, direction: str = UNDIRECTED):
    """Community z-score of the internal degree (z, z_in or z_out)."""
    d_int = _direction_stats(g, p, direction)[0]
    return zscore_within_community(d_int.astype(np.float64), p)


def participation(g: DirectedGraph, p: Partition, direction: str = UNDIRECTED):
    """Participation coefficient: 1 - sum of squared community-degree shares.

    Nodes with no links in the chosen direction get 0.
    """
    stats = _direction_stats(g, p, direction)
    d_int, d_ext, sumsq = stats[0], stats[1], stats[4]
    d = d_int + d_ext
    result = np.zeros(g.node_count, dtype=np.float64)
    nz = d > 0
    # Integer sum of squares keeps the result independent of summation order.
    result[nz] = 1.0 - sumsq[nz] / (d[nz].astype(np.float64) ** 2)
    return result


def external_stats(g: DirectedGraph, p: Partition, direction: str):
    """Raw (pre-z-score) per-node stats: (d_int, d_ext, eps, delta).

    eps counts distinct external communities reached; delta is the population
    standard deviation of the per-external-community link counts over the
    communities actually reached (0 when eps <= 1).
    """
    d_int, d_ext, eps, delta, _ = _direction_stats(g, p, direction)
    return d_int, d_ext, eps, delta


def original_measures(g: DirectedGraph, p: Partition) -> FeatureMatrix:
    values = np.column_stack([
        within_module_degree(g, p, UNDIRECTED),
        participation(g, p, UNDIRECTED),
    ])
    return FeatureMatrix(tuple(MEASURE_COLUMNS[ORIGINAL2]), values, ORIGINAL2)


def directed_measures(g: DirectedGraph, p: Partition) -> FeatureMatrix:
    values = np.column_stack([
        within_module_degree(g, p, IN),
        within_module_degree(g, p, OUT),
        participation(g, p, IN),
        participation(g, p, OUT),
    ])
    return FeatureMatrix(tuple(MEASURE_COLUMNS[DIRECTED4]), values, DIRECTED4)


def generalized_measures(g: DirectedGraph, p: Partition) -> FeatureMatrix:
    """Eight-column matrix: intensities, diversity and heterogeneity per direction."""
    cols = {}
    for direction in (IN, OUT):
        d_int, d_ext, eps, delta, _ = _direction_stats(g, p, direction)
        cols[f"I_int_{direction}"] = zscore_within_community(d_int.astype(np.float64), p)
        cols[f"I_ext_{direction}"] = zscore_within_community(d_ext.astype(np.float64), p)
        cols[f"D_{direction}"] = zscore_within_community(eps.astype(np.float64), p)
        cols[f"H_{direction}"] = zscore_within_community(delta, p)
    names = MEASURE_COLUMNS[GENERALIZED8]
    values = np.column_stack([cols[name] for name in names])
    return FeatureMatrix(tuple(names), values, GENERALIZED8)


def compute_measures(g: DirectedGraph, p: Partition, measure_set: str) -> FeatureMatrix:
    builders = {
        "original": original_measures,
        "directed": directed_measures,
        "generalized": generalized_measures,
    }
    try:
        return builders[measure_set](g, p)
    except KeyError:
        raise RolenetError(f"unknown measure set {measure_set!r}") from None


def classify_by_thresholds(z: float, p_coeff: float) -> ThresholdRole:
    """Reference threshold classifier over the (z, P) role plane."""
    if not 0.0 <= p_coeff <= 1.0:
        raise RolenetError(f"participation coefficient {p_coeff} outside [0, 1]")
    if z >= 2.5:
        if p_coeff <= 0.30:
            return ThresholdRole.PROVINCIAL_HUB
        if p_coeff <= 0.75:
            return ThresholdRole.CONNECTOR_HUB
        return ThresholdRole.KINLESS_HUB
    if p_coeff <= 0.05:
        return ThresholdRole.ULTRA_PERIPHERAL_NON_HUB
    if p_coeff <= 0.62:
        return ThresholdRole.PERIPHERAL_NON_HUB
    if p_coeff <= 0.80:
        return ThresholdRole.CONNECTOR_NON_HUB
    return ThresholdRole.KINLESS_NON_HUB


def save_features(g: DirectedGraph, fm: FeatureMatrix, sink) -> None:
    """CSV export: header 'node,<measure...>', full-precision values."""
    close = False
    if isinstance(sink, (str, os.PathLike)):
        sink = open(sink, "w", encoding="utf-8", newline="")
        close = True
    try:
        writer = csv.writer(sink)
        writer.writerow(["node", *fm.columns])
        for u in range(g.node_count):
            writer.writerow([g.labels[u], *(repr(float(x)) for x in fm.values[u])])
    finally:
        if close:
            sink.close()


def load_features(g: DirectedGraph, source) -> FeatureMatrix:
    close = False
    if isinstance(source, (str, os.PathLike)):
        source = open(source, "r", encoding="utf-8", newline="")
        close = True
    try:
        reader = csv.reader(source)
        header = next(reader, None)
        if not header or header[0] != "node":
            raise RolenetError("feature CSV must start with a 'node,...' header")
        columns = tuple(header[1:])
        values = np.zeros((g.node_count, len(columns)), dtype=np.float64)
        seen = np.zeros(g.node_count, dtype=bool)
        for row in reader:
            if not row:
                continue
            u = g.index_of(row[0])
            values[u] = [float(x) for x in row[1:]]
            seen[u] = True
    finally:
        if close:
            source.close()
    if not seen.all():
        raise RolenetError(f"feature CSV is missing {int((~seen).sum())} node(s)")
    tag = next(
        (t for t, names in MEASURE_COLUMNS.items() if tuple(names) == columns), ""
    )
    return FeatureMatrix(columns, values, tag)


def features_to_csv_string(g: DirectedGraph, fm: FeatureMatrix) -> str:
    buf = io.StringIO()
    save_features(g, fm, buf)
    return buf.getvalue()
