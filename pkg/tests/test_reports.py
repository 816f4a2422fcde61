import json
import logging

import numpy as np
import pytest

import naive
from conftest import make_graph
from rolenet.capitalists import (
    FMIFY,
    HIGH_IN_DEGREE,
    IFYFM,
    LOW_IN_DEGREE,
    CapitalistRecord,
)
from rolenet.clustering import Clustering
from rolenet.errors import RolenetError
from rolenet.reports import (
    PAPER_BUCKET_ORDER,
    capitalist_distribution,
    cluster_interconnection,
    export,
    format_pct,
    paper_buckets,
)


def record(node, ratio, degree_class):
    behavior = IFYFM if ratio > 1 else FMIFY
    return CapitalistRecord(node=node, overlap=0.9, ratio=ratio,
                            in_degree=100, out_degree=100,
                            behavior=behavior, degree_class=degree_class)


def clustering_of(assignment):
    assignment = np.asarray(assignment, dtype=np.int64)
    k = int(assignment.max()) + 1
    return Clustering(k=k, assignment=assignment,
                      centroids=np.zeros((k, 1)))


def test_paper_buckets():
    assert paper_buckets(record(0, 0.5, LOW_IN_DEGREE)) == "low_in_degree r<=1"
    assert paper_buckets(record(0, 1.5, LOW_IN_DEGREE)) == "low_in_degree r>1"
    assert paper_buckets(record(0, 0.6, HIGH_IN_DEGREE)) == "high_in_degree r<=0.7"
    assert paper_buckets(record(0, 0.9, HIGH_IN_DEGREE)) == "high_in_degree 0.7<r<=1"
    assert paper_buckets(record(0, 2.0, HIGH_IN_DEGREE)) == "high_in_degree r>1"


def test_distribution_concentrated():
    c = clustering_of([0] * 5 + [1] * 5)
    records = [record(i, 2.0, LOW_IN_DEGREE) for i in range(3)]
    table = capitalist_distribution(records, c)
    row = PAPER_BUCKET_ORDER.index("low_in_degree r>1")
    assert table.share_of_bucket[row, 0] == 100.0
    assert table.share_of_bucket[row, 1] == 0.0
    assert table.share_of_cluster[row, 0] == pytest.approx(60.0)


def test_distribution_hand_arithmetic():
    # 10 capitalists split 7/3 over clusters of sizes 70 and 300.
    assignment = [0] * 70 + [1] * 300
    c = clustering_of(assignment)
    records = [record(i, 2.0, LOW_IN_DEGREE) for i in range(7)]
    records += [record(70 + i, 2.0, LOW_IN_DEGREE) for i in range(3)]
    table = capitalist_distribution(records, c)
    row = PAPER_BUCKET_ORDER.index("low_in_degree r>1")
    assert table.share_of_bucket[row].tolist() == [70.0, 30.0]
    assert table.share_of_cluster[row, 0] == pytest.approx(10.0)
    assert table.share_of_cluster[row, 1] == pytest.approx(1.0)


def test_distribution_empty_records_warns(caplog):
    c = clustering_of([0, 0, 1, 1])
    with caplog.at_level(logging.WARNING, logger="rolenet.reports"):
        table = capitalist_distribution([], c)
    assert (table.counts == 0).all()
    assert any("empty" in m for m in caplog.messages)


def test_distribution_node_out_of_range():
    c = clustering_of([0, 1])
    with pytest.raises(RolenetError) as exc:
        capitalist_distribution([record(9, 2.0, LOW_IN_DEGREE)], c)
    assert "9" in str(exc.value)


def test_interconnection_single_cluster():
    g = make_graph(3, [(0, 1), (1, 2), (2, 0)])
    inter = cluster_interconnection(g, clustering_of([0, 0, 0]))
    assert inter.counts.tolist() == [[3]]
    assert inter.pct_of_source_out[0, 0] == 100.0
    assert inter.pct_of_all_links[0, 0] == 100.0
    assert inter.pct_of_target_in[0, 0] == 100.0


def test_interconnection_hand_count():
    # 3 arcs A->B, 1 arc B->A, no internal arcs.
    g = make_graph(4, [(0, 2), (0, 3), (1, 2), (2, 0)])
    inter = cluster_interconnection(g, clustering_of([0, 0, 1, 1]))
    assert inter.counts.tolist() == [[0, 3], [1, 0]]
    assert inter.pct_of_source_out[0, 1] == 100.0
    assert inter.pct_of_all_links[0, 1] == 75.0
    assert inter.pct_of_target_in[0, 1] == 100.0


def test_interconnection_filters_display_only(rng):
    n = 30
    arcs = naive.random_arc_set(rng, n, 0.3)
    g = make_graph(n, arcs)
    assignment = naive.random_partition(rng, n, 4)
    k = max(assignment) + 1
    if k < 2:
        return
    unfiltered = cluster_interconnection(g, clustering_of(assignment),
                                         min_pct_all=0.0, min_pct_source=0.0)
    filtered = cluster_interconnection(g, clustering_of(assignment),
                                       min_pct_all=5.0, min_pct_source=20.0)
    assert np.array_equal(unfiltered.counts, filtered.counts)
    assert set(filtered.displayed_arcs()) <= set(unfiltered.displayed_arcs())


def test_interconnection_requires_full_cover():
    g = make_graph(3, [(0, 1)])
    with pytest.raises(RolenetError):
        cluster_interconnection(g, clustering_of([0, 1]))


def test_export_dot_structure():
    g = make_graph(4, [(0, 2), (0, 3), (1, 2), (2, 0)])
    inter = cluster_interconnection(g, clustering_of([0, 0, 1, 1]),
                                    min_pct_all=0.0, min_pct_source=0.0)
    dot = export(inter, "dot")
    assert dot.startswith("digraph")
    assert dot.count("[label=\"C") == 2          # one vertex line per cluster
    assert dot.count("->") == 2                   # two non-empty arcs
    assert "penwidth" in dot


def test_export_distribution_csv_structure():
    c = clustering_of([0, 0, 1])
    table = capitalist_distribution([record(0, 2.0, LOW_IN_DEGREE)], c)
    lines = export(table, "csv").strip().split("\n")
    assert lines[0].startswith("bucket,")
    assert len(lines) == 1 + len(PAPER_BUCKET_ORDER)


def test_export_json_round_trip():
    g = make_graph(4, [(0, 2), (0, 3), (1, 2), (2, 0)])
    inter = cluster_interconnection(g, clustering_of([0, 0, 1, 1]))
    blob = export(inter, "json")
    reserialized = json.dumps(json.loads(blob), sort_keys=True,
                              separators=(",", ":")) + "\n"
    assert reserialized == blob

    c = clustering_of([0, 0, 1, 1])
    table = capitalist_distribution([record(0, 2.0, LOW_IN_DEGREE)], c)
    blob2 = export(table, "json")
    assert json.loads(blob2)["schema"] == "rolenet.distribution.v1"


def test_export_unknown_formats():
    c = clustering_of([0, 1])
    table = capitalist_distribution([], c)
    with pytest.raises(RolenetError):
        export(table, "dot")
    with pytest.raises(RolenetError):
        export(object(), "csv")


def test_format_pct():
    assert format_pct(12.345) == "12.35%"
    assert format_pct(0.004) == "<0.01%"
    assert format_pct(0.0) == "0.00%"
