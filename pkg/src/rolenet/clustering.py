"""Unsupervised role identification.

Standardizes the feature matrix, runs restarted k-means across a range of
cluster counts, and picks the count with the lowest Davies-Bouldin index.
Everything is deterministic given the seed.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateClusteringError, RolenetError
from .roles import FeatureMatrix

ZSCORE = "zscore"
MINMAX = "minmax"


@dataclass(frozen=True)
class NormalizationParams:
    """Per-column affine transform; constant columns map to all-zero."""

    method: str
    shift: np.ndarray = field(repr=False)
    scale: np.ndarray = field(repr=False)

    def apply(self, X: np.ndarray) -> np.ndarray:
        out = np.zeros_like(X, dtype=np.float64)
        nz = self.scale != 0.0
        out[:, nz] = (X[:, nz] - self.shift[nz]) / self.scale[nz]
        return out

    def invert(self, X: np.ndarray) -> np.ndarray:
        return X * self.scale + self.shift


@dataclass
class Clustering:
    k: int
    assignment: np.ndarray = field(repr=False)
    centroids: np.ndarray = field(repr=False)
    inertia: float = 0.0
    db_index: float | None = None
    labels: list | None = None
    inertia_history: list = field(default_factory=list, repr=False)


@dataclass
class KSweepResult:
    best: Clustering
    table: list  # (k, db_index, inertia) rows, ascending k


def normalize(X, method: str = ZSCORE):
    """Standardize columns (population sigma) or min-max scale them.

    Accepts a FeatureMatrix or a 2-d array; returns (same kind, params).
    """
    fm = X if isinstance(X, FeatureMatrix) else None
    data = np.asarray(fm.values if fm is not None else X, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] < 2:
        raise RolenetError("normalization needs at least 2 rows")
    if method == ZSCORE:
        shift = data.mean(axis=0)
        scale = data.std(axis=0)  # population
    elif method == MINMAX:
        shift = data.min(axis=0)
        scale = data.max(axis=0) - shift
    else:
        raise RolenetError(f"unknown normalization method {method!r}")
    params = NormalizationParams(method=method, shift=shift, scale=scale)
    out = params.apply(data)
    if fm is not None:
        return FeatureMatrix(fm.columns, out, fm.tag), params
    return out, params


def _kmeans_pp(X: np.ndarray, k: int, rng) -> np.ndarray:
    n = X.shape[0]
    centroids = np.empty((k, X.shape[1]), dtype=np.float64)
    centroids[0] = X[rng.integers(n)]
    d2 = ((X - centroids[0]) ** 2).sum(axis=1)
    for i in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        centroids[i] = X[idx]
        d2 = np.minimum(d2, ((X - centroids[i]) ** 2).sum(axis=1))
    return centroids


def _assign(X: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # ||x-c||^2 = ||x||^2 - 2 x.c + ||c||^2; ||x||^2 is constant per row.
    cross = X @ centroids.T
    d2 = (centroids ** 2).sum(axis=1)[None, :] - 2.0 * cross
    return np.argmin(d2, axis=1)


def _fix_empty(X, centroids, assignment, k):
    """Reseed each empty cluster to the point farthest from its own centroid."""
    for c in range(k):
        if (assignment == c).any():
            continue
        dist = ((X - centroids[assignment]) ** 2).sum(axis=1)
        j = int(np.argmax(dist))
        if dist[j] <= 0.0:
            break  # fewer distinct points than clusters; leave empty
        centroids[c] = X[j]
        assignment[j] = c
    return assignment


def kmeans(
    X,
    k: int,
    seed=0,
    restarts: int = 10,
    max_iter: int = 300,
    tol: float = 1e-6,
) -> Clustering:
    """Lloyd iterations from k-means++ seeding; best of ``restarts`` by inertia."""
    data = np.asarray(X.values if isinstance(X, FeatureMatrix) else X, dtype=np.float64)
    n = data.shape[0]
    if k < 1:
        raise RolenetError("k must be >= 1")
    if k > n:
        raise RolenetError(f"k={k} exceeds the number of rows ({n})")
    rng = np.random.default_rng(seed)

    best = None
    for _ in range(max(1, restarts)):
        centroids = _kmeans_pp(data, k, rng)
        assignment = _assign(data, centroids)
        assignment = _fix_empty(data, centroids, assignment, k)
        prev_inertia = math.inf
        history = []
        for _ in range(max_iter):
            inertia = float(((data - centroids[assignment]) ** 2).sum())
            history.append(inertia)
            for c in range(k):
                mask = assignment == c
                if mask.any():
                    centroids[c] = data[mask].mean(axis=0)
            new_assignment = _assign(data, centroids)
            new_assignment = _fix_empty(data, centroids, new_assignment, k)
            unchanged = np.array_equal(new_assignment, assignment)
            assignment = new_assignment
            if unchanged:
                break
            if prev_inertia < math.inf and prev_inertia > 0.0:
                if (prev_inertia - inertia) / prev_inertia < tol:
                    break
            prev_inertia = inertia
        for c in range(k):
            mask = assignment == c
            if mask.any():
                centroids[c] = data[mask].mean(axis=0)
        inertia = float(((data - centroids[assignment]) ** 2).sum())
        history.append(inertia)
        if best is None or inertia < best.inertia:
            best = Clustering(
                k=k,
                assignment=assignment.astype(np.int64),
                centroids=centroids.copy(),
                inertia=inertia,
                inertia_history=history,
            )
    return best


def davies_bouldin(X, clustering: Clustering) -> float:
    """Average worst scatter-to-separation ratio; lower is better."""
    data = np.asarray(X.values if isinstance(X, FeatureMatrix) else X, dtype=np.float64)
    k = clustering.k
    if k < 2:
        raise RolenetError("Davies-Bouldin requires k >= 2")
    centroids = clustering.centroids
    scatter = np.zeros(k)
    for c in range(k):
        mask = clustering.assignment == c
        if not mask.any():
            raise DegenerateClusteringError(f"cluster {c} is empty")
        scatter[c] = float(
            np.sqrt(((data[mask] - centroids[c]) ** 2).sum(axis=1)).mean()
        )
    total = 0.0
    for i in range(k):
        worst = 0.0
        for j in range(k):
            if i == j:
                continue
            d_ij = float(np.sqrt(((centroids[i] - centroids[j]) ** 2).sum()))
            if d_ij == 0.0:
                raise DegenerateClusteringError(
                    f"centroids {i} and {j} coincide; clustering is degenerate"
                )
            worst = max(worst, (scatter[i] + scatter[j]) / d_ij)
        total += worst
    return total / k


def sweep_k(
    X,
    k_min: int = 2,
    k_max: int = 15,
    seed: int = 0,
    restarts: int = 10,
    max_iter: int = 300,
    tol: float = 1e-6,
) -> KSweepResult:
    """k-means for each k in [k_min, k_max]; pick the lowest Davies-Bouldin.

    Ties go to the smaller k.  The full (k, db, inertia) table is retained.
    """
    data = np.asarray(X.values if isinstance(X, FeatureMatrix) else X, dtype=np.float64)
    if k_max > data.shape[0]:
        raise RolenetError(f"k_max={k_max} exceeds the number of rows ({data.shape[0]})")
    table = []
    best = None
    best_db = math.inf
    for k in range(k_min, k_max + 1):
        c = kmeans(data, k, seed=[seed, k], restarts=restarts,
                   max_iter=max_iter, tol=tol)
        try:
            c.db_index = davies_bouldin(data, c)
        except DegenerateClusteringError:
            c.db_index = math.inf
        table.append((k, c.db_index, c.inertia))
        if c.db_index < best_db:
            best_db = c.db_index
            best = c
    if best is None or not math.isfinite(best_db):
        raise DegenerateClusteringError("every k produced a degenerate clustering")
    return KSweepResult(best=best, table=table)


def label_clusters(centroids: np.ndarray, columns) -> list:
    """Heuristic role names for generalized-measure centroids in original units.

    Advisory naming only; raw centroids remain the ground truth.
    """
    columns = list(columns)
    required = ["I_int_in", "I_int_out", "I_ext_in", "I_ext_out",
                "D_in", "D_out", "H_in", "H_out"]
    if not all(c in columns for c in required):
        raise RolenetError("label_clusters needs the generalized measure columns")
    idx = {c: columns.index(c) for c in required}
    names = []
    for row in np.asarray(centroids, dtype=np.float64):
        internal = (row[idx["I_int_in"]] + row[idx["I_int_out"]]) / 2.0
        ext = np.array([row[idx[c]] for c in
                        ("I_ext_in", "I_ext_out", "D_in", "D_out", "H_in", "H_out")])
        hub = "hub" if internal >= 1.0 else "non-hub"
        if (ext < 0.0).all():
            tier = "ultra-peripheral"
        elif ext.min() >= 5.0:
            tier = "kinless"
        elif ext.mean() >= 0.5:
            tier = "connector"
        else:
            d_in, d_out = row[idx["D_in"]], row[idx["D_out"]]
            if abs(d_in - d_out) < 0.1:
                tier = "peripheral"
            elif d_in > d_out:
                tier = "incoming peripheral"
            else:
                tier = "outgoing peripheral"
        names.append(f"{tier} {hub}")
    return names


def save_assignment(labels, clustering: Clustering, sink) -> None:
    """CSV: node_label,cluster."""
    close = False
    if isinstance(sink, (str, os.PathLike)):
        sink = open(sink, "w", encoding="utf-8", newline="")
        close = True
    try:
        writer = csv.writer(sink)
        writer.writerow(["node", "cluster"])
        for label, c in zip(labels, clustering.assignment):
            writer.writerow([label, int(c)])
    finally:
        if close:
            sink.close()


def save_centroids(columns, normalized, original, cluster_labels, sink) -> None:
    """CSV with one row per cluster, normalized and original units side by side."""
    close = False
    if isinstance(sink, (str, os.PathLike)):
        sink = open(sink, "w", encoding="utf-8", newline="")
        close = True
    try:
        writer = csv.writer(sink)
        header = ["cluster", "role"]
        header += [f"{c}_norm" for c in columns] + [f"{c}_orig" for c in columns]
        writer.writerow(header)
        for c in range(len(normalized)):
            role = cluster_labels[c] if cluster_labels else ""
            writer.writerow([c, role, *(repr(float(x)) for x in normalized[c]),
                             *(repr(float(x)) for x in original[c])])
    finally:
        if close:
            sink.close()


def save_db_table(table, sink) -> None:
    """CSV: k,db_index,inertia."""
    close = False
    if isinstance(sink, (str, os.PathLike)):
        sink = open(sink, "w", encoding="utf-8", newline="")
        close = True
    try:
        writer = csv.writer(sink)
        writer.writerow(["k", "db_index", "inertia"])
        for k, db, inertia in table:
            writer.writerow([k, repr(float(db)), repr(float(inertia))])
    finally:
        if close:
            sink.close()
