"""Detection and behavioral classification of social capitalists.

A node is flagged when its follower/followee sets overlap heavily and both
degrees clear the configured floors; the follower/followee ratio then splits
the flagged nodes into behavior classes.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np

from ._backend import get_backend
from .errors import RolenetError
from .graph import DirectedGraph

FMIFY = "FMIFY"
IFYFM = "IFYFM"
PASSIVE = "Passive"

LOW_IN_DEGREE = "LowInDegree"
HIGH_IN_DEGREE = "HighInDegree"


@dataclass(frozen=True)
class DetectionConfig:
    """Thresholds; defaults follow the published detection setup.

    Degree constraints and the overlap threshold are strict ('more than').
    """

    overlap_threshold: float = 0.74
    min_followers: int = 500
    min_followees: int = 500
    high_degree: int = 10000
    passive_bound: float = 0.7


@dataclass(frozen=True)
class CapitalistRecord:
    node: int
    overlap: float
    ratio: float
    in_degree: int
    out_degree: int
    behavior: str
    degree_class: str


def overlap_index(g: DirectedGraph, u: int) -> float:
    """|followers & followees| / min(|followers|, |followees|)."""
    din = g.degree(u, "in")
    dout = g.degree(u, "out")
    if min(din, dout) == 0:
        raise RolenetError(f"overlap index undefined for node {u} (a degree is 0)")
    kern = get_backend()
    hits = kern.overlap_counts(
        g.out_indptr, g.out_indices, g.in_indptr, g.in_indices,
        np.array([u], dtype=np.int64),
    )[0]
    return float(hits) / min(din, dout)


def ratio(g: DirectedGraph, u: int) -> float:
    """Followers per followee: in-degree / out-degree."""
    dout = g.degree(u, "out")
    if dout == 0:
        raise RolenetError(f"ratio undefined for node {u} (out-degree is 0)")
    return g.degree(u, "in") / dout


def classify_behavior(r: float, cfg: DetectionConfig) -> str:
    if r > 1.0:
        return IFYFM
    if r > cfg.passive_bound:
        return FMIFY
    return PASSIVE


def detect(g: DirectedGraph, cfg: DetectionConfig | None = None) -> list[CapitalistRecord]:
    """All nodes passing the degree and overlap gates, sorted by node index."""
    cfg = cfg or DetectionConfig()
    din = g.in_degrees()
    dout = g.out_degrees()
    candidates = np.flatnonzero((din > cfg.min_followers) & (dout > cfg.min_followees))
    if candidates.size == 0:
        return []
    kern = get_backend()
    hits = kern.overlap_counts(
        g.out_indptr, g.out_indices, g.in_indptr, g.in_indices,
        candidates.astype(np.int64),
    )
    min_deg = np.minimum(din[candidates], dout[candidates])
    overlaps = hits / min_deg
    keep = overlaps > cfg.overlap_threshold

    records = []
    for u, o in zip(candidates[keep], overlaps[keep]):
        u = int(u)
        r = int(din[u]) / int(dout[u])
        records.append(CapitalistRecord(
            node=u,
            overlap=float(o),
            ratio=r,
            in_degree=int(din[u]),
            out_degree=int(dout[u]),
            behavior=classify_behavior(r, cfg),
            degree_class=HIGH_IN_DEGREE if din[u] > cfg.high_degree else LOW_IN_DEGREE,
        ))
    return records


def save_records(g: DirectedGraph, records, sink) -> None:
    """CSV: node_label,overlap,ratio,in_degree,out_degree,behavior,degree_class."""
    close = False
    if isinstance(sink, (str, os.PathLike)):
        sink = open(sink, "w", encoding="utf-8", newline="")
        close = True
    try:
        writer = csv.writer(sink)
        writer.writerow(
            ["node", "overlap", "ratio", "in_degree", "out_degree",
             "behavior", "degree_class"]
        )
        for rec in records:
            writer.writerow([
                g.labels[rec.node], repr(rec.overlap), repr(rec.ratio),
                rec.in_degree, rec.out_degree, rec.behavior, rec.degree_class,
            ])
    finally:
        if close:
            sink.close()


def load_records(g: DirectedGraph, source) -> list[CapitalistRecord]:
    close = False
    if isinstance(source, (str, os.PathLike)):
        source = open(source, "r", encoding="utf-8", newline="")
        close = True
    try:
        reader = csv.reader(source)
        header = next(reader, None)
        if not header or header[0] != "node":
            raise RolenetError("capitalist CSV must start with a 'node,...' header")
        records = []
        for row in reader:
            if not row:
                continue
            records.append(CapitalistRecord(
                node=g.index_of(row[0]),
                overlap=float(row[1]),
                ratio=float(row[2]),
                in_degree=int(row[3]),
                out_degree=int(row[4]),
                behavior=row[5],
                degree_class=row[6],
            ))
    finally:
        if close:
            source.close()
    return records
