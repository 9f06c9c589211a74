"""Weighted graph node clustering with a Gumbel-softmax assignment matrix."""

from .graph import (
    Assignment,
    DomainError,
    GraphError,
    ParseError,
    WeightedGraph,
    adjacency,
    export_dot,
    karate_club,
    load_edge_list,
    read_edge_list,
    to_edge_list,
)
from .metrics import MetricsReport, evaluate, modularity
from .train import ClusterModel, TrainConfig, TrainReport, assign, train

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "ClusterModel",
    "DomainError",
    "GraphError",
    "MetricsReport",
    "ParseError",
    "TrainConfig",
    "TrainReport",
    "WeightedGraph",
    "adjacency",
    "assign",
    "evaluate",
    "export_dot",
    "karate_club",
    "load_edge_list",
    "modularity",
    "read_edge_list",
    "to_edge_list",
    "train",
]
