"""Weighted undirected graphs, edge-list I/O and the bundled karate club data."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "GraphError",
    "ParseError",
    "DomainError",
    "WeightedGraph",
    "Assignment",
    "load_edge_list",
    "read_edge_list",
    "to_edge_list",
    "karate_club",
    "adjacency",
    "export_dot",
    "PALETTE",
]

# Qualitative palette (ColorBrewer Set3 + Pastel1); cluster ids wrap around.
PALETTE = (
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
    "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f",
    "#fbb4ae", "#b3cde3", "#decbe4", "#fed9a6",
)

_N_NODES_DIRECTIVE = re.compile(r"^#\s*n_nodes\s*:\s*(\d+)\s*$")


class GraphError(ValueError):
    """Invalid graph data or an argument inconsistent with a graph."""


class DomainError(ValueError):
    """Numeric argument outside the domain of an operation."""


class ParseError(GraphError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph on nodes ``0..n_nodes-1`` with positive edge weights.

    Edges are stored once each as ``(u, v, w)`` with ``u < v``, sorted.
    ``node_labels`` optionally carries a ground-truth cluster id per node.
    """

    n_nodes: int
    edges: tuple[tuple[int, int, float], ...] = ()
    node_labels: Optional[tuple[int, ...]] = None
    _adj: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n_nodes < 0:
            raise GraphError(f"n_nodes must be non-negative, got {self.n_nodes}")
        seen = set()
        normalized = []
        for u, v, w in self.edges:
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise GraphError(f"self-loop on node {u}")
            if not (0 <= u < self.n_nodes and 0 <= v < self.n_nodes):
                raise GraphError(f"edge ({u}, {v}) outside 0..{self.n_nodes - 1}")
            if not math.isfinite(w) or w <= 0:
                raise GraphError(f"edge ({u}, {v}) has invalid weight {w!r}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
            normalized.append((key[0], key[1], w))
        normalized.sort()
        object.__setattr__(self, "edges", tuple(normalized))

        if self.node_labels is not None:
            labels = tuple(int(c) for c in self.node_labels)
            if len(labels) != self.n_nodes:
                raise GraphError(
                    f"{len(labels)} node labels for {self.n_nodes} nodes")
            if any(c < 0 for c in labels):
                raise GraphError("node labels must be non-negative")
            object.__setattr__(self, "node_labels", labels)

        adj = np.zeros((self.n_nodes, self.n_nodes))
        for u, v, w in self.edges:
            adj[u, v] = adj[v, u] = w
        adj.setflags(write=False)
        object.__setattr__(self, "_adj", adj)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def total_weight(self) -> float:
        return math.fsum(w for _, _, w in self.edges)

    def ground_truth(self) -> "Assignment":
        if self.node_labels is None:
            raise GraphError("graph carries no ground-truth labels")
        return Assignment.from_labels(self.node_labels)


@dataclass(frozen=True)
class Assignment:
    """Hard partition: ``cluster_of[i]`` is the cluster id of node ``i``."""

    cluster_of: tuple[int, ...]
    k: int

    def __post_init__(self):
        labels = tuple(int(c) for c in self.cluster_of)
        object.__setattr__(self, "cluster_of", labels)
        if self.k < 1:
            raise GraphError(f"k must be at least 1, got {self.k}")
        if labels and self.k > len(labels):
            raise GraphError(f"k={self.k} exceeds the {len(labels)} nodes")
        bad = [c for c in labels if not 0 <= c < self.k]
        if bad:
            raise GraphError(f"cluster id {bad[0]} outside 0..{self.k - 1}")

    @classmethod
    def from_labels(cls, labels: Iterable[int], k: Optional[int] = None) -> "Assignment":
        """Build from arbitrary non-negative labels.

        Without ``k`` the labels are compacted to ``0..k-1`` in order of first
        appearance; with ``k`` they are kept as given.
        """
        labels = [int(c) for c in labels]
        if k is not None:
            return cls(tuple(labels), k)
        remap: dict[int, int] = {}
        compact = [remap.setdefault(c, len(remap)) for c in labels]
        return cls(tuple(compact), max(len(remap), 1))

    def __len__(self) -> int:
        return len(self.cluster_of)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.cluster_of, dtype=np.int64)

    def clusters(self) -> list[list[int]]:
        members: list[list[int]] = [[] for _ in range(self.k)]
        for node, c in enumerate(self.cluster_of):
            members[c].append(node)
        return members

    def n_nonempty(self) -> int:
        return len(set(self.cluster_of))


def load_edge_list(text: str, n_nodes: Optional[int] = None,
                   node_labels: Optional[Sequence[int]] = None) -> WeightedGraph:
    """Parse whitespace-separated ``u v [w]`` lines; ``#`` starts a comment.

    The node count is ``max id + 1`` unless given explicitly or declared by a
    ``# n_nodes: N`` comment line (which is how isolated trailing nodes
    survive a round trip through :func:`to_edge_list`).
    """
    edges = []
    declared = None
    max_id = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        m = _N_NODES_DIRECTIVE.match(raw.strip())
        if m:
            declared = int(m.group(1))
            continue
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ParseError(lineno, f"expected 'u v [w]', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(lineno, f"node ids must be integers: {line!r}") from None
        if u < 0 or v < 0:
            raise ParseError(lineno, "node ids must be non-negative")
        try:
            w = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError:
            raise ParseError(lineno, f"weight is not a number: {parts[2]!r}") from None
        if not math.isfinite(w) or w <= 0:
            raise GraphError(f"line {lineno}: weight must be positive and finite, got {parts[2]}")
        edges.append((u, v, w))
        max_id = max(max_id, u, v)

    if n_nodes is None:
        n_nodes = declared if declared is not None else max_id + 1
    if n_nodes <= max_id:
        raise GraphError(f"node id {max_id} exceeds declared n_nodes={n_nodes}")
    return WeightedGraph(n_nodes, tuple(edges), node_labels)


def read_edge_list(path, labels_path=None) -> WeightedGraph:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    labels = None
    if labels_path is not None:
        with open(labels_path, encoding="utf-8") as fh:
            labels = _parse_labels(fh.read())
    return load_edge_list(text, node_labels=labels)


def to_edge_list(graph: WeightedGraph) -> str:
    """Serialize to the edge-list format read by :func:`load_edge_list`."""
    lines = [f"# n_nodes: {graph.n_nodes}"]
    lines += [f"{u} {v} {w!r}" for u, v, w in graph.edges]
    return "\n".join(lines) + "\n"


def _parse_labels(text: str) -> list[int]:
    labels = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            labels.append(int(line))
        except ValueError:
            raise ParseError(lineno, f"label is not an integer: {line!r}") from None
    return labels


def karate_club() -> WeightedGraph:
    """Zachary's weighted karate club network with its two-faction labels."""
    data = resources.files("wgcgs") / "data"
    text = (data / "karate.edgelist").read_text(encoding="utf-8")
    labels = _parse_labels((data / "karate.labels").read_text(encoding="utf-8"))
    return load_edge_list(text, node_labels=labels)


def adjacency(graph: WeightedGraph) -> np.ndarray:
    """Dense symmetric weight matrix (a fresh writable copy)."""
    return np.array(graph._adj)


def export_dot(graph: WeightedGraph, assignment: Assignment, name: str = "G") -> str:
    """Graphviz DOT text with nodes filled by cluster id and weighted edge labels."""
    if len(assignment) != graph.n_nodes:
        raise GraphError(
            f"assignment covers {len(assignment)} nodes, graph has {graph.n_nodes}")
    out = [f"graph {_dot_id(name)} {{",
           "  node [style=filled, shape=circle, fontname=\"Helvetica\"];"]
    for node, c in enumerate(assignment.cluster_of):
        color = PALETTE[c % len(PALETTE)]
        out.append(f'  {node} [fillcolor="{color}", comment="cluster {c}"];')
    for u, v, w in graph.edges:
        out.append(f'  {u} -- {v} [label="{w:g}"];')
    out.append("}")
    return "\n".join(out) + "\n"


def _dot_id(name: str) -> str:
    if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'
