import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rolenet.errors import EdgeListParseError, RolenetError
from rolenet.graph import (
    ingest_string,
    load_cache,
    save_cache,
    write_edge_list,
)


def test_basic_ingestion():
    g = ingest_string("a b\nb a\na c\n")
    assert g.node_count == 3
    assert g.arc_count == 3
    a = g.index_of("a")
    assert g.degree(a, "out") == 2
    assert g.degree(a, "in") == 1


def test_self_loop_dropped():
    g = ingest_string("a a\n")
    assert g.node_count == 1
    assert g.arc_count == 0


def test_duplicates_collapsed():
    g = ingest_string("a b\na b\n")
    assert g.arc_count == 1


def test_comments_and_blank_lines_ignored():
    g = ingest_string("# header\n% other\n\na b\n")
    assert g.arc_count == 1


def test_malformed_line_reports_line_number():
    with pytest.raises(EdgeListParseError) as exc:
        ingest_string("a b\na b c\n")
    assert exc.value.line_number == 2


def test_empty_input_errors():
    with pytest.raises(RolenetError):
        ingest_string("# only comments\n")


def test_adjacency_rows_sorted_and_consistent(rng):
    n = 30
    arcs = {(int(rng.integers(n)), int(rng.integers(n))) for _ in range(200)}
    text = "".join(f"x{a} x{b}\n" for a, b in arcs)
    g = ingest_string(text)
    arc_set = set(g.arcs())
    back = {(int(v), u) for u in range(g.node_count) for v in g.predecessors(u)}
    assert arc_set == back
    assert len(arc_set) == g.arc_count
    for u in range(g.node_count):
        row = g.successors(u)
        assert (np.diff(row) > 0).all()
        assert (np.diff(g.predecessors(u)) > 0).all()
        assert u not in row


def test_input_order_does_not_matter(rng):
    lines = [f"v{int(rng.integers(20))} w{int(rng.integers(20))}" for _ in range(80)]
    g1 = ingest_string("\n".join(lines))
    shuffled = list(lines)
    rng.shuffle(shuffled)
    g2 = ingest_string("\n".join(shuffled))
    assert list(g1.labels) == list(g2.labels)
    assert np.array_equal(g1.out_indptr, g2.out_indptr)
    assert np.array_equal(g1.out_indices, g2.out_indices)
    assert np.array_equal(g1.in_indptr, g2.in_indptr)
    assert np.array_equal(g1.in_indices, g2.in_indices)


def test_round_trip_export_reingest():
    g = ingest_string("a b\nb c\nc a\nb a\n")
    buf = io.StringIO()
    write_edge_list(g, buf)
    g2 = ingest_string(buf.getvalue())
    assert list(g.labels) == list(g2.labels)
    assert np.array_equal(g.out_indptr, g2.out_indptr)
    assert np.array_equal(g.out_indices, g2.out_indices)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(
        st.tuples(st.integers(0, 9), st.integers(0, 9)),
        min_size=1,
        max_size=60,
    )
)
def test_in_degree_matches_brute_force(pairs):
    cleaned = {(a, b) for a, b in pairs if a != b}
    if not cleaned:
        return
    text = "".join(f"p{a} p{b}\n" for a, b in cleaned)
    g = ingest_string(text)
    for u in range(g.node_count):
        label = g.label_of(u)
        expect = sum(1 for a, b in cleaned if f"p{b}" == label)
        assert g.degree(u, "in") == expect


def test_degree_bad_index_and_direction():
    g = ingest_string("a b\n")
    with pytest.raises(IndexError):
        g.degree(5, "out")
    with pytest.raises(ValueError):
        g.degree(0, "sideways")
    with pytest.raises(KeyError):
        g.index_of("zzz")


def test_cache_round_trip(tmp_path):
    g = ingest_string("a b\nb c\nc a\nb a\n")
    path = tmp_path / "graph.bin"
    save_cache(g, path)
    g2 = load_cache(path)
    assert g2.node_count == g.node_count
    assert g2.arc_count == g.arc_count
    assert list(g2.labels) == list(g.labels)
    assert np.array_equal(g2.in_indices, g.in_indices)


def test_cache_deterministic_bytes(tmp_path):
    g = ingest_string("a b\nb c\nc a\n")
    p1, p2 = tmp_path / "a.bin", tmp_path / "b.bin"
    save_cache(g, p1)
    save_cache(g, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_cache_bad_magic(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"NOTAGRPH" + b"\x00" * 32)
    with pytest.raises(RolenetError):
        load_cache(path)
