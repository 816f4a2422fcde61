"""Synthetic directed graphs with planted communities, role archetypes and
capitalist behavior, used as ground truth in end-to-end tests.

Generation is a stochastic block model background plus deterministic-given-
seed overlays; the same seed always yields byte-identical graphs.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import RolenetError
from .graph import DirectedGraph, _from_arc_arrays

HUB = "hub"
CONNECTOR = "connector"
KINLESS = "kinless"
PERIPHERAL = "peripheral"

ARCHETYPES = (HUB, CONNECTOR, KINLESS, PERIPHERAL)


@dataclass(frozen=True)
class RolePlant:
    archetype: str
    count: int
    external_communities: int = 2
    degree_multiplier: float = 5.0


@dataclass(frozen=True)
class CapitalistPlant:
    count: int
    reciprocity: float = 0.95
    ifyfm_skew: float = 0.5  # probability a one-way partner link points inward
    partner_count: int = 30


@dataclass(frozen=True)
class PlantedSpec:
    community_sizes: tuple
    p_intra: float = 0.1
    p_inter: float = 0.01
    role_plants: tuple = ()
    capitalist_plant: CapitalistPlant | None = None
    seed: int = 0

    def validate(self) -> None:
        if not self.community_sizes or any(s <= 0 for s in self.community_sizes):
            raise RolenetError("community sizes must be positive")
        for p in (self.p_intra, self.p_inter):
            if not 0.0 <= p <= 1.0:
                raise RolenetError(f"arc probability {p} outside [0, 1]")
        cap = self.capitalist_plant
        if cap is not None:
            if not 0.0 <= cap.reciprocity <= 1.0 or not 0.0 <= cap.ifyfm_skew <= 1.0:
                raise RolenetError("capitalist plant rates must lie in [0, 1]")
        for plant in self.role_plants:
            if plant.archetype not in ARCHETYPES:
                raise RolenetError(f"unknown archetype {plant.archetype!r}")


@dataclass
class GroundTruth:
    communities: np.ndarray = field(repr=False)
    planted_roles: dict = field(default_factory=dict)
    planted_capitalists: list = field(default_factory=list)


def generate(spec: PlantedSpec):
    """Return (DirectedGraph, GroundTruth) for a planted spec."""
    spec.validate()
    sizes = np.array(spec.community_sizes, dtype=np.int64)
    n = int(sizes.sum())
    comm = np.repeat(np.arange(len(sizes), dtype=np.int64), sizes)
    starts = np.concatenate(([0], np.cumsum(sizes)[:-1]))
    rng = np.random.default_rng(spec.seed)

    cap = spec.capitalist_plant
    n_cap = cap.count if cap else 0
    if n_cap > n:
        raise RolenetError("more planted capitalists than nodes")
    cap_nodes = np.sort(rng.choice(n, size=n_cap, replace=False)) if n_cap else \
        np.empty(0, dtype=np.int64)
    is_cap = np.zeros(n, dtype=bool)
    is_cap[cap_nodes] = True

    # Block-model background; planted capitalists are kept out of it so the
    # overlay fully controls their neighborhoods (and thus their overlap).
    prob = np.where(comm[:, None] == comm[None, :], spec.p_intra, spec.p_inter)
    adj = rng.random((n, n)) < prob
    np.fill_diagonal(adj, False)
    adj[is_cap, :] = False
    adj[:, is_cap] = False

    truth = GroundTruth(communities=comm.copy())

    if cap:
        pool = np.flatnonzero(~is_cap)
        if pool.size < cap.partner_count:
            raise RolenetError("not enough non-planted nodes for capitalist partners")
        for u in cap_nodes:
            u = int(u)
            partners = rng.choice(pool, size=cap.partner_count, replace=False)
            for v in partners:
                v = int(v)
                if rng.random() < cap.reciprocity:
                    adj[u, v] = True
                    adj[v, u] = True
                elif rng.random() < cap.ifyfm_skew:
                    adj[v, u] = True
                else:
                    adj[u, v] = True
            truth.planted_capitalists.append(u)

    if spec.role_plants:
        _apply_role_plants(spec, adj, comm, sizes, starts, is_cap, rng, truth)

    src, dst = np.nonzero(adj)
    if src.size == 0:
        raise RolenetError("generated graph has no arcs; raise the probabilities")
    width = max(4, len(str(n - 1)))
    labels = np.array([f"n{i:0{width}d}" for i in range(n)], dtype=object)
    g = _from_arc_arrays(labels, src.astype(np.int64), dst.astype(np.int64))
    return g, truth


def _apply_role_plants(spec, adj, comm, sizes, starts, is_cap, rng, truth):
    n = len(comm)
    n_comm = len(sizes)
    used = set(truth.planted_capitalists)
    pool = [u for u in range(n) if u not in used]
    for plant in spec.role_plants:
        if plant.count > len(pool):
            raise RolenetError("not enough nodes left for role plants")
        chosen = rng.choice(np.array(pool, dtype=np.int64), size=plant.count,
                            replace=False)
        for u in np.sort(chosen):
            u = int(u)
            pool.remove(u)
            truth.planted_roles[u] = plant.archetype
            _plant_one(plant, u, adj, comm, sizes, starts, rng, n_comm)


def _plant_one(plant, u, adj, comm, sizes, starts, rng, n_comm):
    c0 = int(comm[u])
    if plant.archetype == PERIPHERAL:
        external = comm != c0
        adj[u, external] = False
        adj[external, u] = False
        return

    if plant.archetype in (HUB, KINLESS):
        # Internal boost: reciprocal links to a multiplier-sized slice of the
        # community, well above the background internal degree.
        want = min(int(sizes[c0]) - 1,
                   max(3, math.ceil(plant.degree_multiplier * spec_internal(sizes[c0]))))
        members = np.arange(starts[c0], starts[c0] + sizes[c0])
        members = members[members != u]
        targets = rng.choice(members, size=want, replace=False)
        adj[u, targets] = True
        adj[targets, u] = True

    if plant.archetype in (CONNECTOR, KINLESS):
        if plant.archetype == KINLESS:
            n_targets = max(plant.external_communities,
                            math.ceil(0.8 * (n_comm - 1)))
        else:
            n_targets = plant.external_communities
        others = [c for c in range(n_comm) if c != c0]
        if n_targets > len(others):
            raise RolenetError(
                f"plant needs {n_targets} external communities, only {len(others)} exist"
            )
        target_comms = others[:n_targets]
        for c in target_comms:
            per_comm = max(2, math.ceil(plant.degree_multiplier
                                        * spec_external(sizes[c])))
            if per_comm > sizes[c]:
                raise RolenetError(
                    f"plant needs {per_comm} nodes in community {c}, which has {sizes[c]}"
                )
            members = np.arange(starts[c], starts[c] + sizes[c])
            targets = rng.choice(members, size=per_comm, replace=False)
            adj[u, targets] = True
            adj[targets, u] = True


def spec_internal(size) -> float:
    """Baseline internal-degree scale used by the hub overlay."""
    return max(1.0, 0.1 * float(size))


def spec_external(size) -> float:
    """Baseline per-community external-degree scale used by overlays."""
    return max(1.0, 0.05 * float(size))


def write_ground_truth(g: DirectedGraph, truth: GroundTruth, sink) -> None:
    """CSV: node,community,role,capitalist."""
    close = False
    if isinstance(sink, (str, os.PathLike)):
        sink = open(sink, "w", encoding="utf-8", newline="")
        close = True
    try:
        writer = csv.writer(sink)
        writer.writerow(["node", "community", "role", "capitalist"])
        caps = set(truth.planted_capitalists)
        for u in range(len(truth.communities)):
            writer.writerow([
                g.labels[u] if u < g.node_count else u,
                int(truth.communities[u]),
                truth.planted_roles.get(u, ""),
                1 if u in caps else 0,
            ])
    finally:
        if close:
            sink.close()
