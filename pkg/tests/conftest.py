import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rolenet.community import Partition
from rolenet.graph import DirectedGraph, _from_arc_arrays


def make_graph(n: int, arcs) -> DirectedGraph:
    """Graph over dense indices 0..n-1 from (src, dst) index pairs.

    Labels are zero-padded so lexicographic label order matches index order;
    isolated nodes are kept.
    """
    labels = np.array([f"n{i:06d}" for i in range(n)], dtype=object)
    pairs = [(int(a), int(b)) for a, b in arcs]
    src = np.array([p[0] for p in pairs], dtype=np.int64)
    dst = np.array([p[1] for p in pairs], dtype=np.int64)
    return _from_arc_arrays(labels, src, dst)


def make_partition(assignment) -> Partition:
    return Partition.from_assignment(np.asarray(assignment, dtype=np.int64))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
