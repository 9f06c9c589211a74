import itertools

import numpy as np
import pytest

import oracles
from wgcgs.baselines import (connected_components, edge_betweenness, girvan_newman,
                             greedy_modularity, label_propagation, leading_eigenpair,
                             leading_eigenvector, modularity_matrix)
from wgcgs.graph import DomainError, GraphError, WeightedGraph, adjacency
from wgcgs.metrics import contingency, entropy_metrics, modularity


def same_partition(a, b):
    return len(set(zip(a, b))) == len(set(a)) == len(set(b))


COMPONENTS = (0, 0, 0, 1, 1, 1)


# -- label propagation --------------------------------------------------------

def test_lpa_two_triangles(two_triangles):
    for seed in range(5):
        res = label_propagation(two_triangles, seed)
        assert same_partition(res.assignment.cluster_of, COMPONENTS)


def test_lpa_single_edge():
    res = label_propagation(WeightedGraph(2, ((0, 1, 2.0),)), seed=3)
    assert res.assignment.cluster_of == (0, 0)


def test_lpa_karate_modularity(karate):
    good = sum(label_propagation(karate, seed).modularity > 0.30 for seed in range(10))
    assert good >= 8


def test_lpa_deterministic(karate):
    assert label_propagation(karate, 4) == label_propagation(karate, 4)


def test_lpa_isolated_nodes_keep_own_label():
    res = label_propagation(WeightedGraph(4, ((0, 1, 1.0),)), seed=0)
    assert res.assignment.cluster_of == (0, 0, 1, 2)


# -- greedy modularity --------------------------------------------------------

def test_mom_two_triangles(two_triangles):
    res = greedy_modularity(two_triangles)
    assert same_partition(res.assignment.cluster_of, COMPONENTS)
    assert res.modularity == pytest.approx(0.5, abs=1e-15)


def test_mom_karate(karate):
    res = greedy_modularity(karate)
    assert res.modularity >= 0.35
    assert res.modularity >= modularity(karate, list(range(34)))


def test_mom_complete_graph():
    k4 = WeightedGraph(4, tuple((u, v, 1.0) for u, v in itertools.combinations(range(4), 2)))
    res = greedy_modularity(k4)
    assert res.assignment.k == 1 or res.modularity <= 0


def test_mom_edgeless():
    with pytest.raises(DomainError):
        greedy_modularity(WeightedGraph(3))


def test_mom_beats_local_move_oracle(rng):
    # no single-node move out of the returned partition may improve modularity
    for _ in range(20):
        n = int(rng.integers(4, 10))
        edges = oracles.random_weighted_graph(rng, n, p=0.4)
        if not edges:
            continue
        g = WeightedGraph(n, tuple(edges))
        res = greedy_modularity(g)
        labels = list(res.assignment.cluster_of)
        q = modularity(g, labels)
        assert q >= modularity(g, list(range(n))) - 1e-12
        for node, c in itertools.product(range(n), range(max(labels) + 2)):
            moved = labels.copy()
            moved[node] = c
            assert modularity(g, moved) <= q + 1e-9


# -- leading eigenvector ------------------------------------------------------

def test_ecm_two_triangles(two_triangles):
    res = leading_eigenvector(two_triangles, 2)
    assert same_partition(res.assignment.cluster_of, COMPONENTS)


def test_ecm_karate_homogeneous(karate):
    res = leading_eigenvector(karate, 2)
    h, *_ = entropy_metrics(contingency(karate.node_labels, res.assignment))
    assert h == 1.0


def test_ecm_stops_without_gain():
    k4 = WeightedGraph(4, tuple((u, v, 1.0) for u, v in itertools.combinations(range(4), 2)))
    assert leading_eigenvector(k4, 4).assignment.k == 1


def test_power_iteration_matches_eigh(rng):
    for _ in range(30):
        edges = oracles.random_weighted_graph(rng, 6, p=0.6)
        if not edges:
            continue
        B = modularity_matrix(adjacency(WeightedGraph(6, tuple(edges))))
        value, vec = leading_eigenpair(B)
        vals, vecs = np.linalg.eigh(B)
        if vals[-1] - vals[-2] < 1e-3:
            continue   # near-degenerate top eigenvalue has no unique vector
        ref = vecs[:, -1]
        assert value == pytest.approx(vals[-1], abs=1e-6)
        assert min(np.abs(vec - ref).max(), np.abs(vec + ref).max()) < 1e-6


# -- Girvan-Newman ------------------------------------------------------------

def test_gn_path_tie_breaks_lexicographically():
    path = WeightedGraph(3, ((0, 1, 1.0), (1, 2, 1.0)))
    assert girvan_newman(path, 2).assignment.cluster_of == (0, 1, 1)


def test_gn_bridge_removed_first(barbell):
    scores = edge_betweenness(6, barbell.edges)
    assert max(scores, key=scores.get) == (2, 3)
    assert same_partition(girvan_newman(barbell, 2).assignment.cluster_of, COMPONENTS)


def test_gn_k_too_large(barbell):
    with pytest.raises(GraphError):
        girvan_newman(barbell, 7)


def test_betweenness_matches_path_enumeration(rng):
    for _ in range(40):
        n = int(rng.integers(2, 8))
        # small integer weights give exact ties between distinct shortest paths
        edges = [(u, v, float(rng.choice([1, 2, 4]))) for u, v in itertools.combinations(range(n), 2)
                 if rng.random() < 0.5]
        if not edges:
            continue
        got = edge_betweenness(n, edges)
        want = oracles.betweenness_by_paths(n, edges)
        for e in want:
            assert got[e] == pytest.approx(want[e], abs=1e-9)


def test_betweenness_unweighted_path():
    assert edge_betweenness(3, [(0, 1, 1.0), (1, 2, 1.0)]) == {(0, 1): 2.0, (1, 2): 2.0}


# -- shared properties --------------------------------------------------------

def all_baselines(graph, k=2):
    return [label_propagation(graph, 1), greedy_modularity(graph),
            leading_eigenvector(graph, k), girvan_newman(graph, k)]


def test_valid_partitions_on_karate(karate):
    for res in all_baselines(karate):
        a = res.assignment
        assert len(a) == 34 and set(a.cluster_of) == set(range(a.k))
        assert res.modularity == pytest.approx(modularity(karate, a))


def test_no_merging_across_components(rng):
    for _ in range(10):
        left = oracles.random_weighted_graph(rng, 5, p=0.7)
        right = [(u + 5, v + 5, w) for u, v, w in oracles.random_weighted_graph(rng, 5, p=0.7)]
        g = WeightedGraph(10, tuple(left + right))
        comps = connected_components(10, g.edges)
        for res in all_baselines(g, k=4):
            for u, v in itertools.combinations(range(10), 2):
                if res.assignment.cluster_of[u] == res.assignment.cluster_of[v]:
                    assert comps[u] == comps[v], res.algorithm


def test_deterministic(karate):
    assert all_baselines(karate) == all_baselines(karate)
