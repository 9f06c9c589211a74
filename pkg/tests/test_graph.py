import re
from importlib import resources

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wgcgs.graph import (Assignment, GraphError, ParseError, WeightedGraph, adjacency,
                         export_dot, karate_club, load_edge_list, to_edge_list)


def test_load_simple():
    g = load_edge_list("0 1 4\n0 2 5")
    A = adjacency(g)
    assert g.n_nodes == 3
    assert A[0, 1] == 4 and A[0, 2] == 5 and A[1, 2] == 0


def test_default_weight_and_comments():
    g = load_edge_list("# header\n0 1   # trailing\n\n")
    assert g.edges == ((0, 1, 1.0),)


@pytest.mark.parametrize("text", ["0 1 -2", "0 1 0", "0 1 nan", "0 1 inf"])
def test_bad_weight(text):
    with pytest.raises(GraphError):
        load_edge_list(text)


def test_parse_error_line_number():
    with pytest.raises(ParseError) as info:
        load_edge_list("0 1 2\n# ok\n0 x 3\n")
    assert info.value.lineno == 3
    assert "line 3" in str(info.value)


@pytest.mark.parametrize("text", ["0", "0 1 2 3", "a b"])
def test_malformed(text):
    with pytest.raises(ParseError):
        load_edge_list(text)


def test_duplicate_edge_either_direction():
    with pytest.raises(GraphError, match="duplicate"):
        load_edge_list("0 1 1\n1 0 2\n")


def test_self_loop_rejected():
    with pytest.raises(GraphError, match="self-loop"):
        load_edge_list("2 2 1")


def test_adjacency_small_cases():
    assert adjacency(WeightedGraph(2, ((0, 1, 3),))).tolist() == [[0, 3], [3, 0]]
    assert np.array_equal(adjacency(WeightedGraph(3)), np.zeros((3, 3)))


def test_adjacency_copy_is_independent():
    g = WeightedGraph(2, ((0, 1, 3),))
    A = adjacency(g)
    A[0, 1] = 99
    assert adjacency(g)[0, 1] == 3


def test_karate_dataset(karate):
    assert karate.n_nodes == 34
    assert karate.n_edges == 78
    truth = karate.ground_truth()
    assert truth.cluster_of[0] != truth.cluster_of[33]
    assert truth.k == 2


def test_karate_asset_line_count():
    text = (resources.files("wgcgs") / "data" / "karate.edgelist").read_text()
    rows = [l for l in text.splitlines() if l.strip() and not l.startswith("#")]
    assert len(rows) == 78


def test_karate_weight_matches_asset(karate):
    text = (resources.files("wgcgs") / "data" / "karate.edgelist").read_text()
    w01 = next(float(l.split()[2]) for l in text.splitlines() if l.startswith("0 1 "))
    assert adjacency(karate)[0, 1] == w01 == 4.0


def test_explicit_node_count_keeps_isolated_nodes():
    g = load_edge_list("0 1 2\n", n_nodes=5)
    assert g.n_nodes == 5
    with pytest.raises(GraphError):
        load_edge_list("0 7 1\n", n_nodes=5)


def test_assignment_validation():
    Assignment((0, 1, 1), 2)
    with pytest.raises(GraphError):
        Assignment((0, 2), 2)
    with pytest.raises(GraphError):
        Assignment((0, 0), 3)
    with pytest.raises(GraphError):
        Assignment((), 0)


def test_assignment_from_labels_compacts():
    a = Assignment.from_labels([7, 7, 3, 9])
    assert a.cluster_of == (0, 0, 1, 2) and a.k == 3


def test_export_dot_single_node():
    dot = export_dot(WeightedGraph(1), Assignment((0,), 1))
    assert dot.startswith("graph G {") and dot.rstrip().endswith("}")
    assert len(set(re.findall(r'fillcolor="(#[0-9a-f]{6})"', dot))) == 1


def test_export_dot_karate(karate):
    dot = export_dot(karate, karate.ground_truth())
    nodes = re.findall(r"^\s+(\d+) \[fillcolor", dot, flags=re.M)
    assert len(nodes) == karate.n_nodes
    assert len(set(re.findall(r'fillcolor="(#[0-9a-f]{6})"', dot))) == 2
    assert len(re.findall(r"--", dot)) == 78
    assert '0 -- 1 [label="4"]' in dot


def test_export_dot_length_mismatch(karate):
    with pytest.raises(GraphError):
        export_dot(karate, Assignment((0, 1), 2))


@st.composite
def graphs(draw, max_nodes=12):
    n = draw(st.integers(1, max_nodes))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True) if pairs else st.just([]))
    weights = draw(st.lists(st.floats(1e-3, 1e3, allow_nan=False), min_size=len(chosen),
                            max_size=len(chosen)))
    return WeightedGraph(n, tuple((u, v, w) for (u, v), w in zip(chosen, weights)))


@given(graphs())
@settings(max_examples=200)
def test_round_trip(g):
    back = load_edge_list(to_edge_list(g))
    assert back.n_nodes == g.n_nodes
    assert sorted(back.edges) == sorted(g.edges)


@given(graphs())
@settings(max_examples=200)
def test_adjacency_exactly_symmetric_and_sums(g):
    A = adjacency(g)
    assert np.array_equal(A, A.T)
    assert np.all(np.diag(A) == 0)
    assert np.isclose(A.sum(), 2 * sum(w for _, _, w in g.edges))
