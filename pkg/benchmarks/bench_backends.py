"""Compare the compiled and pure-Python kernel backends on a synthetic graph.

Usage: python3 benchmarks/bench_backends.py [--sizes 300,300,300] [--repeat 3]

Times the three kernel entry points (Louvain local moves via a full run,
role statistics, overlap counting) on both backends and verifies that the
outputs agree bitwise.
"""

import argparse
import time

import numpy as np

from rolenet import _backend
from rolenet.community import LouvainConfig, louvain_with_stats
from rolenet.synth import CapitalistPlant, PlantedSpec, generate


def timeit(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="300,300,300")
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    sizes = tuple(int(s) for s in args.sizes.split(","))
    spec = PlantedSpec(
        community_sizes=sizes, p_intra=0.05, p_inter=0.005, seed=args.seed,
        capitalist_plant=CapitalistPlant(count=10, partner_count=40),
    )
    g, _ = generate(spec)
    print(f"graph: {g.node_count} nodes, {g.arc_count} arcs")

    try:
        backends = {"python": _backend.get_backend("python"),
                    "cython": _backend.get_backend("cython")}
    except ImportError:
        print("compiled backend not built; run pip install -e . first")
        return 1

    comm = np.arange(g.node_count, dtype=np.int64) % len(sizes)
    nodes = np.arange(g.node_count, dtype=np.int64)
    rows = []
    outputs = {}
    for name, kern in backends.items():
        t_louvain, part = timeit(
            lambda: louvain_with_stats(g, LouvainConfig(seed=0), backend=name),
            args.repeat,
        )
        t_roles, stats = timeit(
            lambda: kern.role_stats(g.out_indptr, g.out_indices, comm,
                                    len(sizes)),
            args.repeat,
        )
        t_overlap, hits = timeit(
            lambda: kern.overlap_counts(g.out_indptr, g.out_indices,
                                        g.in_indptr, g.in_indices, nodes),
            args.repeat,
        )
        outputs[name] = (part[0].assignment, stats, hits)
        rows.append((name, t_louvain, t_roles, t_overlap))

    print(f"{'backend':<8} {'louvain':>10} {'role_stats':>12} {'overlap':>10}")
    for name, t1, t2, t3 in rows:
        print(f"{name:<8} {t1:>9.4f}s {t2:>11.4f}s {t3:>9.4f}s")
    base = rows[0]
    for name, t1, t2, t3 in rows[1:]:
        print(f"speedup vs {base[0]}: louvain x{base[1] / t1:.1f}, "
              f"role_stats x{base[2] / t2:.1f}, overlap x{base[3] / t3:.1f}")

    a, b = outputs["python"], outputs["cython"]
    same = (np.array_equal(a[0], b[0])
            and all(np.array_equal(x, y) for x, y in zip(a[1], b[1]))
            and np.array_equal(a[2], b[2]))
    print(f"outputs bitwise identical: {same}")
    return 0 if same else 1


if __name__ == "__main__":
    raise SystemExit(main())
