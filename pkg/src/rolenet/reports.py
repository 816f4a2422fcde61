"""Analysis reports: capitalist-over-cluster distributions and the cluster
interconnection graph, with CSV/JSON/DOT export."""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .capitalists import HIGH_IN_DEGREE, CapitalistRecord
from .clustering import Clustering
from .errors import RolenetError
from .graph import DirectedGraph

logger = logging.getLogger(__name__)

PAPER_BUCKET_ORDER = [
    "low_in_degree r<=1",
    "low_in_degree r>1",
    "high_in_degree r<=0.7",
    "high_in_degree 0.7<r<=1",
    "high_in_degree r>1",
]


def paper_buckets(record: CapitalistRecord) -> str:
    """Degree-class x ratio-band bucketing: a two-way ratio split for low
    in-degree capitalists, a three-way split for high in-degree ones."""
    if record.degree_class == HIGH_IN_DEGREE:
        if record.ratio <= 0.7:
            return "high_in_degree r<=0.7"
        if record.ratio <= 1.0:
            return "high_in_degree 0.7<r<=1"
        return "high_in_degree r>1"
    return "low_in_degree r<=1" if record.ratio <= 1.0 else "low_in_degree r>1"


@dataclass
class DistributionTable:
    """Cross-tabulation of capitalist buckets over clusters.

    Each cell holds (share of the bucket in this cluster, share of the
    cluster that belongs to this bucket), both in percent.
    """

    buckets: list
    cluster_count: int
    counts: np.ndarray = field(repr=False)        # (buckets, clusters)
    cluster_sizes: np.ndarray = field(repr=False)

    @property
    def bucket_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def share_of_bucket(self) -> np.ndarray:
        totals = self.bucket_totals.astype(np.float64)
        out = np.zeros_like(self.counts, dtype=np.float64)
        nz = totals > 0
        out[nz] = self.counts[nz] / totals[nz, None] * 100.0
        return out

    @property
    def share_of_cluster(self) -> np.ndarray:
        sizes = self.cluster_sizes.astype(np.float64)
        out = np.zeros_like(self.counts, dtype=np.float64)
        nz = sizes > 0
        out[:, nz] = self.counts[:, nz] / sizes[None, nz] * 100.0
        return out


@dataclass
class InterconnectionGraph:
    """k x k arc table with three normalizations per arc.

    The display filters never change the stored table; they only decide which
    arcs :meth:`displayed_arcs` (and the DOT export) show.
    """

    cluster_count: int
    counts: np.ndarray = field(repr=False)        # (k, k) arc counts
    cluster_sizes: np.ndarray = field(repr=False)
    min_pct_all: float = 1.0
    min_pct_source: float = 10.0

    @property
    def pct_of_source_out(self) -> np.ndarray:
        totals = self.counts.sum(axis=1).astype(np.float64)
        out = np.zeros_like(self.counts, dtype=np.float64)
        nz = totals > 0
        out[nz] = self.counts[nz] / totals[nz, None] * 100.0
        return out

    @property
    def pct_of_all_links(self) -> np.ndarray:
        total = float(self.counts.sum())
        if total == 0:
            return np.zeros_like(self.counts, dtype=np.float64)
        return self.counts / total * 100.0

    @property
    def pct_of_target_in(self) -> np.ndarray:
        totals = self.counts.sum(axis=0).astype(np.float64)
        out = np.zeros_like(self.counts, dtype=np.float64)
        nz = totals > 0
        out[:, nz] = self.counts[:, nz] / totals[None, nz] * 100.0
        return out

    def displayed_arcs(self) -> list:
        """(i, j) pairs surviving the display filters, row-major order."""
        pct_all = self.pct_of_all_links
        pct_src = self.pct_of_source_out
        keep = []
        for i in range(self.cluster_count):
            for j in range(self.cluster_count):
                if self.counts[i, j] == 0:
                    continue
                if pct_all[i, j] < self.min_pct_all:
                    continue
                if pct_src[i, j] < self.min_pct_source:
                    continue
                keep.append((i, j))
        return keep


def capitalist_distribution(
    records, clustering: Clustering, bucketing=None, bucket_order=None
) -> DistributionTable:
    """Cross-tabulate capitalist records over the clusters they fall in."""
    if bucketing is None:
        bucketing = paper_buckets
        bucket_order = bucket_order or PAPER_BUCKET_ORDER
    n = len(clustering.assignment)
    k = clustering.k
    cluster_sizes = np.bincount(clustering.assignment, minlength=k).astype(np.int64)

    keys = []
    for rec in records:
        if not 0 <= rec.node < n:
            raise RolenetError(f"record node {rec.node} is not covered by the clustering")
        keys.append(bucketing(rec))

    if bucket_order is None:
        bucket_order = sorted(set(keys))
    if not records:
        logger.warning("capitalist distribution over an empty record list")
    counts = np.zeros((len(bucket_order), k), dtype=np.int64)
    row_of = {b: i for i, b in enumerate(bucket_order)}
    for rec, key in zip(records, keys):
        if key not in row_of:
            raise RolenetError(f"bucket {key!r} not present in bucket_order")
        counts[row_of[key], clustering.assignment[rec.node]] += 1
    return DistributionTable(
        buckets=list(bucket_order),
        cluster_count=k,
        counts=counts,
        cluster_sizes=cluster_sizes,
    )


def cluster_interconnection(
    g: DirectedGraph,
    clustering: Clustering,
    min_pct_all: float = 1.0,
    min_pct_source: float = 10.0,
) -> InterconnectionGraph:
    """Single pass over arcs, accumulating cluster-to-cluster counts."""
    if len(clustering.assignment) != g.node_count:
        raise RolenetError("clustering does not cover all graph nodes")
    k = clustering.k
    src, dst = g.arc_array()
    cs = clustering.assignment[src]
    cd = clustering.assignment[dst]
    flat = np.bincount(cs * k + cd, minlength=k * k)
    return InterconnectionGraph(
        cluster_count=k,
        counts=flat.reshape(k, k).astype(np.int64),
        cluster_sizes=np.bincount(clustering.assignment, minlength=k).astype(np.int64),
        min_pct_all=min_pct_all,
        min_pct_source=min_pct_source,
    )


def format_pct(x: float) -> str:
    """Render a percentage at 2 decimals with a '<0.01%' sentinel."""
    if 0.0 < x < 0.005:
        return "<0.01%"
    return f"{x:.2f}%"


def export(report, fmt: str) -> str:
    """Serialize a report; CSV/JSON carry full-precision values."""
    fmt = fmt.lower()
    if isinstance(report, DistributionTable):
        if fmt == "csv":
            return _distribution_csv(report)
        if fmt == "json":
            return _distribution_json(report)
        raise RolenetError(f"unsupported format {fmt!r} for a distribution table")
    if isinstance(report, InterconnectionGraph):
        if fmt == "csv":
            return _interconnection_csv(report)
        if fmt == "json":
            return _interconnection_json(report)
        if fmt == "dot":
            return _interconnection_dot(report)
        raise RolenetError(f"unsupported format {fmt!r} for an interconnection graph")
    raise RolenetError(f"cannot export object of type {type(report).__name__}")


def _distribution_csv(table: DistributionTable) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    header = ["bucket", "bucket_total"]
    for c in range(table.cluster_count):
        header += [f"cluster{c}_share_of_bucket", f"cluster{c}_share_of_cluster"]
    writer.writerow(header)
    sob = table.share_of_bucket
    soc = table.share_of_cluster
    for i, bucket in enumerate(table.buckets):
        row = [bucket, int(table.bucket_totals[i])]
        for c in range(table.cluster_count):
            row += [repr(float(sob[i, c])), repr(float(soc[i, c]))]
        writer.writerow(row)
    return buf.getvalue()


def _distribution_json(table: DistributionTable) -> str:
    payload = {
        "schema": "rolenet.distribution.v1",
        "clusters": int(table.cluster_count),
        "cluster_sizes": [int(x) for x in table.cluster_sizes],
        "rows": [
            {
                "bucket": bucket,
                "total": int(table.bucket_totals[i]),
                "counts": [int(x) for x in table.counts[i]],
                "share_of_bucket": [float(x) for x in table.share_of_bucket[i]],
                "share_of_cluster": [float(x) for x in table.share_of_cluster[i]],
            }
            for i, bucket in enumerate(table.buckets)
        ],
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def _interconnection_csv(graph: InterconnectionGraph) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(
        ["source", "target", "arcs",
         "pct_of_source_out", "pct_of_all_links", "pct_of_target_in"]
    )
    src_pct = graph.pct_of_source_out
    all_pct = graph.pct_of_all_links
    tgt_pct = graph.pct_of_target_in
    for i in range(graph.cluster_count):
        for j in range(graph.cluster_count):
            writer.writerow([
                i, j, int(graph.counts[i, j]),
                repr(float(src_pct[i, j])), repr(float(all_pct[i, j])), repr(float(tgt_pct[i, j])),
            ])
    return buf.getvalue()


def _interconnection_json(graph: InterconnectionGraph) -> str:
    payload = {
        "schema": "rolenet.interconnection.v1",
        "clusters": int(graph.cluster_count),
        "cluster_sizes": [int(x) for x in graph.cluster_sizes],
        "filters": {
            "min_pct_all": graph.min_pct_all,
            "min_pct_source": graph.min_pct_source,
        },
        "counts": [[int(x) for x in row] for row in graph.counts],
        "pct_of_source_out": [[float(x) for x in row] for row in graph.pct_of_source_out],
        "pct_of_all_links": [[float(x) for x in row] for row in graph.pct_of_all_links],
        "pct_of_target_in": [[float(x) for x in row] for row in graph.pct_of_target_in],
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"


def _interconnection_dot(graph: InterconnectionGraph) -> str:
    """DOT rendering: vertex size follows cluster node count, arc pen-width
    follows the share of all links; filtered arcs are omitted."""
    lines = ["digraph clusters {"]
    max_size = max(1, int(graph.cluster_sizes.max()))
    for c in range(graph.cluster_count):
        size = int(graph.cluster_sizes[c])
        width = 0.5 + 1.5 * size / max_size
        lines.append(
            f'  C{c} [label="C{c}\\n{size} nodes" width={width:.3f} fixedsize=true];'
        )
    src_pct = graph.pct_of_source_out
    all_pct = graph.pct_of_all_links
    tgt_pct = graph.pct_of_target_in
    for i, j in graph.displayed_arcs():
        label = "|".join(
            format_pct(x) for x in (src_pct[i, j], all_pct[i, j], tgt_pct[i, j])
        )
        penwidth = max(0.5, 10.0 * all_pct[i, j] / 100.0)
        lines.append(f'  C{i} -> C{j} [label="{label}" penwidth={penwidth:.3f}];')
    lines.append("}")
    return "\n".join(lines) + "\n"
