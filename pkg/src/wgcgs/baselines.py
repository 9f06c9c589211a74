"""Classical community detection baselines on weighted graphs.

Four algorithms, all deterministic for fixed inputs:

* label propagation (PL), seeded random sweep order
* multi-level greedy modularity (MOM, Louvain-style)
* recursive leading-eigenvector bisection of the modularity matrix (ECM)
* Girvan-Newman edge-betweenness removal (EB), distances 1/w
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .graph import Assignment, DomainError, GraphError, WeightedGraph, adjacency
from .metrics import modularity

__all__ = [
    "BaselineResult",
    "ALGORITHMS",
    "label_propagation",
    "greedy_modularity",
    "leading_eigenvector",
    "leading_eigenpair",
    "modularity_matrix",
    "girvan_newman",
    "edge_betweenness",
    "connected_components",
]

ALGORITHMS = ("PL", "MOM", "ECM", "EB")

_REL_TOL = 1e-9


@dataclass(frozen=True)
class BaselineResult:
    algorithm: str
    assignment: Assignment
    modularity: float

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "assignment": list(self.assignment.cluster_of),
            "k": self.assignment.k,
            "modularity": self.modularity,
        }


def _result(name: str, graph: WeightedGraph, labels) -> BaselineResult:
    assignment = Assignment.from_labels(labels)
    q = modularity(graph, assignment) if graph.n_edges else 0.0
    return BaselineResult(name, assignment, q)


def _require_edges(graph: WeightedGraph):
    if graph.n_edges == 0:
        raise DomainError("algorithm needs at least one edge")


def _neighbors(graph: WeightedGraph) -> list[list[tuple[int, float]]]:
    nbrs: list[list[tuple[int, float]]] = [[] for _ in range(graph.n_nodes)]
    for u, v, w in graph.edges:
        nbrs[u].append((v, w))
        nbrs[v].append((u, w))
    return nbrs


def connected_components(n: int, edges) -> list[int]:
    """Component id per node, ids in order of lowest member."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v, *_ in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    roots: dict[int, int] = {}
    return [roots.setdefault(find(i), len(roots)) for i in range(n)]


# -- label propagation -------------------------------------------------------

def label_propagation(graph: WeightedGraph, seed: int = 0,
                      max_sweeps: int = 100) -> BaselineResult:
    """Asynchronous weighted label propagation.

    Nodes are visited in a fresh random order each sweep and take the label
    with the largest total incident weight. A node keeps its label when that
    label is among the best; otherwise the lowest tied label wins.
    """
    if graph.n_nodes == 0:
        raise GraphError("label propagation needs a non-empty graph")
    rng = np.random.default_rng(seed)
    nbrs = _neighbors(graph)
    labels = list(range(graph.n_nodes))
    for _ in range(max_sweeps):
        changed = False
        for node in rng.permutation(graph.n_nodes):
            if not nbrs[node]:
                continue
            score: dict[int, float] = {}
            for other, w in nbrs[node]:
                score[labels[other]] = score.get(labels[other], 0.0) + w
            best = max(score.values())
            tied = [lab for lab, s in score.items() if s >= best * (1 - _REL_TOL)]
            if labels[node] in tied:
                continue
            labels[node] = min(tied)
            changed = True
        if not changed:
            break
    return _result("PL", graph, labels)


# -- multi-level greedy modularity ------------------------------------------

def _local_moves(A: np.ndarray, two_m: float) -> tuple[list[int], bool]:
    """One level of node moves on the (aggregated) weight matrix ``A``."""
    n = A.shape[0]
    comm = list(range(n))
    strength = A.sum(axis=1)
    comm_tot = strength.copy()
    moved_any = False
    improved = True
    while improved:
        improved = False
        for node in range(n):
            old = comm[node]
            links: dict[int, float] = {}
            for other in np.nonzero(A[node])[0]:
                if other != node:
                    links[comm[other]] = links.get(comm[other], 0.0) + A[node, other]
            k_i = strength[node]
            comm_tot[old] -= k_i
            # gain of inserting node into c, up to a constant shared by all c
            base = links.get(old, 0.0) - comm_tot[old] * k_i / two_m
            best_c, best_gain = old, base
            for c in sorted(links):
                gain = links[c] - comm_tot[c] * k_i / two_m
                if gain > best_gain + _REL_TOL * abs(best_gain) + 1e-15:
                    best_c, best_gain = c, gain
            comm_tot[best_c] += k_i
            if best_c != old:
                comm[node] = best_c
                improved = moved_any = True
    remap: dict[int, int] = {}
    return [remap.setdefault(c, len(remap)) for c in comm], moved_any


def greedy_modularity(graph: WeightedGraph) -> BaselineResult:
    """Louvain-style optimization: local moves, aggregate, repeat until no gain.

    Nodes are scanned in id order and ties keep the current community, so the
    result is deterministic.
    """
    _require_edges(graph)
    A = adjacency(graph)
    two_m = A.sum()
    membership = np.arange(graph.n_nodes)
    while True:
        level, moved = _local_moves(A, two_m)
        if not moved:
            break
        level = np.asarray(level)
        membership = level[membership]
        n_comm = level.max() + 1
        onehot = np.zeros((A.shape[0], n_comm))
        onehot[np.arange(A.shape[0]), level] = 1.0
        A = onehot.T @ A @ onehot
    return _result("MOM", graph, membership.tolist())


# -- leading eigenvector -----------------------------------------------------

def modularity_matrix(A: np.ndarray) -> np.ndarray:
    """``B = A - k k^T / 2m`` for a weighted adjacency matrix."""
    strength = A.sum(axis=1)
    return A - np.outer(strength, strength) / strength.sum()


def leading_eigenpair(M: np.ndarray, tol: float = 1e-10,
                      max_iter: int = 10_000) -> tuple[float, np.ndarray]:
    """Largest algebraic eigenvalue of symmetric ``M`` by shifted power iteration.

    The shift by the max absolute row sum makes every eigenvalue of
    ``M + shift I`` non-negative, so the dominant one is the one we want.
    The start vector is fixed, which makes the sign of the result repeatable.
    """
    n = M.shape[0]
    if n == 1:
        return float(M[0, 0]), np.ones(1)
    shift = np.abs(M).sum(axis=1).max()
    shifted = M + shift * np.eye(n)
    v = np.random.default_rng(12345).uniform(0.5, 1.5, size=n)
    v /= np.linalg.norm(v)
    for _ in range(max_iter):
        w = shifted @ v
        norm = np.linalg.norm(w)
        if norm == 0:
            return 0.0, v
        w /= norm
        if np.linalg.norm(w - v) < tol:
            v = w
            break
        v = w
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    return float(v @ M @ v), v


def _split_gain(B: np.ndarray, members: np.ndarray, two_m: float):
    """Best bisection of community ``members``: (delta Q, side mask) or None."""
    if len(members) < 2:
        return None
    sub = B[np.ix_(members, members)]
    # generalized modularity matrix of the subgroup
    sub = sub - np.diag(sub.sum(axis=1))
    value, vec = leading_eigenpair(sub)
    if value <= 1e-12:
        return None
    s = np.where(vec >= 0, 1.0, -1.0)
    if abs(s.sum()) == len(s):
        return None
    gain = float(s @ sub @ s) / (2 * two_m)
    if gain <= 1e-12:
        return None
    return gain, s > 0


def leading_eigenvector(graph: WeightedGraph, k: int = 2) -> BaselineResult:
    """Recursive spectral bisection of the weighted modularity matrix.

    At each step the community whose split raises modularity most is
    bisected by the sign of its leading eigenvector, until ``k`` communities
    exist or no split gains.
    """
    _require_edges(graph)
    if not 1 <= k <= graph.n_nodes:
        raise GraphError(f"k must lie in 1..{graph.n_nodes}, got {k}")
    A = adjacency(graph)
    two_m = A.sum()
    B = modularity_matrix(A)
    communities = [np.arange(graph.n_nodes)]
    while len(communities) < k:
        best = None
        for idx, members in enumerate(communities):
            split = _split_gain(B, members, two_m)
            if split and (best is None or split[0] > best[0] + 1e-12):
                best = (split[0], idx, split[1])
        if best is None:
            break
        _, idx, side = best
        members = communities.pop(idx)
        communities[idx:idx] = [members[side], members[~side]]
    labels = np.empty(graph.n_nodes, dtype=np.int64)
    for c, members in enumerate(sorted(communities, key=lambda m: m.min())):
        labels[members] = c
    return _result("ECM", graph, labels.tolist())


# -- Girvan-Newman -----------------------------------------------------------

def _close(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=_REL_TOL, abs_tol=1e-12)


def edge_betweenness(n: int, edges) -> dict[tuple[int, int], float]:
    """Weighted edge betweenness over unordered node pairs (Brandes).

    ``edges`` holds ``(u, v, w)``; the length of an edge is ``1 / w``. Path
    lengths that agree within a relative 1e-9 count as equally short.
    """
    nbrs: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for u, v, w in edges:
        nbrs[u].append((v, 1.0 / w))
        nbrs[v].append((u, 1.0 / w))
    score = {(min(u, v), max(u, v)): 0.0 for u, v, _ in edges}

    for source in range(n):
        dist = [math.inf] * n
        sigma = [0.0] * n
        preds: list[list[int]] = [[] for _ in range(n)]
        dist[source] = 0.0
        sigma[source] = 1.0
        order = []
        done = [False] * n
        heap = [(0.0, source)]
        while heap:
            d, node = heapq.heappop(heap)
            if done[node]:
                continue
            done[node] = True
            order.append(node)
            for other, length in nbrs[node]:
                if done[other]:
                    continue
                cand = d + length
                if dist[other] < math.inf and _close(cand, dist[other]):
                    sigma[other] += sigma[node]
                    preds[other].append(node)
                elif cand < dist[other]:
                    dist[other] = cand
                    sigma[other] = sigma[node]
                    preds[other] = [node]
                    heapq.heappush(heap, (cand, other))

        delta = [0.0] * n
        for node in reversed(order):
            for p in preds[node]:
                share = sigma[p] / sigma[node] * (1.0 + delta[node])
                score[(min(p, node), max(p, node))] += share
                delta[p] += share
    # each unordered pair was counted from both endpoints
    return {e: s / 2 for e, s in score.items()}


def girvan_newman(graph: WeightedGraph, k: int = 2) -> BaselineResult:
    """Remove the highest-betweenness edge until ``k`` components remain.

    Betweenness is recomputed after every removal; ties go to the
    lexicographically smallest edge.
    """
    if k > graph.n_nodes or k < 1:
        raise GraphError(f"k must lie in 1..{graph.n_nodes}, got {k}")
    _require_edges(graph)
    edges = list(graph.edges)
    comps = connected_components(graph.n_nodes, edges)
    while max(comps) + 1 < k and edges:
        scores = edge_betweenness(graph.n_nodes, edges)
        top = max(scores.values())
        victim = min(e for e, s in scores.items() if _close(s, top) or s > top)
        edges = [e for e in edges if (e[0], e[1]) != victim]
        comps = connected_components(graph.n_nodes, edges)
    return _result("EB", graph, comps)
