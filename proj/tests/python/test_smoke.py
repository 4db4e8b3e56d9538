"""Smoke tests for the callrisk python module."""

import json
import math
import os
from pathlib import Path

import pytest

import callrisk

DATA = Path(os.environ.get("CALLRISK_DATA", Path(__file__).resolve().parents[2] / "data"))


def test_version():
    assert callrisk.__version__


def test_parse_dot_counts():
    g = callrisk.parse_dot((DATA / "sample_callgraph.dot").read_text())
    assert g.node_count == 30
    assert g.edge_count == 49
    assert g.self_loop_count == 1
    assert g.total_weight == 51


def test_parse_errors_surface_as_value_error():
    with pytest.raises(ValueError):
        callrisk.parse_dot("digraph { ->")


def test_edge_list_round_trip():
    g = callrisk.parse_edge_list("a b 2\nb c\n")
    text = callrisk.serialize_edge_list(g)
    assert text == "a b 2\nb c 1\n"
    again = callrisk.parse_edge_list(text)
    assert again.edge_count == 2


def test_graph_from_edges_and_degrees():
    g = callrisk.CallGraph.from_edges([("a", "b", 1), ("b", "a", 2)], ["lonely"])
    assert g.node_count == 3
    assert ("a", "b", 1) in g.edges()


def test_hop_distances_and_dbscan():
    g = callrisk.parse_edge_list("a b\nb c\nx y\ny z")
    dm = callrisk.hop_distance_model(g)
    assert dm.at(0, 2) == 2.0
    c = callrisk.dbscan(dm, eps=1.0, min_pts=2)
    assert c.cluster_count == 2
    assert c.noise_count == 0


def test_hdbscan_on_dense_matrix():
    ids = [f"p{i}" for i in range(20)]
    rows = [[0.0 if i == j else (1.0 if (i < 10) == (j < 10) else 10.0)
             for j in range(20)] for i in range(20)]
    dm = callrisk.DistanceModel.from_dense(ids, rows, sentinel=11.0)
    c = callrisk.hdbscan(dm, min_cluster_size=5)
    assert c.cluster_count == 2
    assert c.noise_count == 0
    assert callrisk.silhouette(dm, c) >= 0.5


def test_leiden_modularity_and_connectivity():
    g = callrisk.parse_edge_list("a b\nb c\nc a\nd e\ne f\nf d\nc d")
    view = callrisk.project_undirected(g)
    c = callrisk.leiden(view, resolution=1.0, seed=42)
    assert c.cluster_count == 2
    assert c.quality == pytest.approx(5.0 / 14.0)
    p = callrisk.Partition.from_labels(view, c.labels)
    assert callrisk.check_connectivity(view, p) == []
    assert callrisk.modularity(view, p) == pytest.approx(5.0 / 14.0)


def test_heuristics_hub():
    edges = [("hub", f"s{i}", 1) for i in range(40)]
    edges += [(f"s{i}", f"s{(i + 4) % 40}", 1) for i in range(40)]
    g = callrisk.CallGraph.from_edges(edges, [])
    view = callrisk.project_undirected(g)
    c = callrisk.leiden(view, seed=1)
    findings, counts = callrisk.run_heuristics(g, c)
    assert counts["hub"] == 1
    hub = [f for f in findings if f.heuristic == "hub"][0]
    assert hub.subject == "hub"
    assert hub.cwes == ["CWE-20"]


def test_analyze_end_to_end():
    g = callrisk.load_graph(str(DATA / "planted_threats.edgelist"))
    result = callrisk.analyze(g, algorithms=["leiden"], seed=42, no_timing=True)
    report = json.loads(result["report_json"])
    assert report["graph"]["nodes"] == g.node_count
    assert report["runs"][0]["algorithm"] == "leiden"
    assert result["finding_count"] == len(report["findings"])
    assert result["finding_count"] > 0
    assert "# Call graph risk report" in result["report_markdown"]


def test_export_round_trips():
    g = callrisk.load_graph(str(DATA / "clean_blocks.edgelist"))
    view = callrisk.project_undirected(g)
    c = callrisk.leiden(view, seed=3)
    dot = callrisk.export_top_k_dot(g, c, k=2)
    again = callrisk.parse_dot(dot)
    assert again.node_count > 0
    assert again.edge_count > 0


def test_node_cap_raises():
    g = callrisk.CallGraph.from_edges([(f"n{i}", f"n{i+1}", 1) for i in range(10)], [])
    with pytest.raises(RuntimeError):
        callrisk.hop_distance_model(g, node_cap=5)
