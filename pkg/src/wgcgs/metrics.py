"""External clustering scores and weighted modularity."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence, Union

import numpy as np

from .graph import Assignment, DomainError, GraphError, WeightedGraph, adjacency

__all__ = [
    "ContingencyTable",
    "EntropyScores",
    "MetricsReport",
    "contingency",
    "adjusted_rand_index",
    "entropy_metrics",
    "modularity",
    "evaluate",
    "format_table",
    "to_csv",
    "CSV_COLUMNS",
]

Labels = Union[Assignment, Sequence[int], np.ndarray]

CSV_COLUMNS = ("algorithm", "ari", "nmi", "homo", "comp", "vmes", "modularity",
               "modularity_unweighted")


def _labels(x: Labels) -> np.ndarray:
    if isinstance(x, Assignment):
        return x.as_array()
    return np.asarray(x, dtype=np.int64)


@dataclass(frozen=True)
class ContingencyTable:
    """``counts[c, j]`` = number of items in true class ``c`` and cluster ``j``.

    Only non-empty classes and clusters get a row/column.
    """

    counts: np.ndarray
    n: int


def contingency(truth: Labels, pred: Labels) -> ContingencyTable:
    t, p = _labels(truth), _labels(pred)
    if t.shape != p.shape or t.ndim != 1:
        raise GraphError(f"label lengths differ: {t.shape} vs {p.shape}")
    classes, t_idx = np.unique(t, return_inverse=True)
    clusters, p_idx = np.unique(p, return_inverse=True)
    counts = np.zeros((len(classes), len(clusters)), dtype=np.int64)
    np.add.at(counts, (t_idx, p_idx), 1)
    return ContingencyTable(counts, int(t.size))


def _comb2(x):
    x = np.asarray(x, dtype=np.int64)
    return (x * (x - 1) // 2).sum()


def adjusted_rand_index(table: ContingencyTable) -> float:
    """Hubert-Arabie adjusted Rand index from pair counts."""
    if table.n < 2:
        raise DomainError("ARI needs at least two items")
    sum_cells = int(_comb2(table.counts))
    sum_rows = int(_comb2(table.counts.sum(axis=1)))
    sum_cols = int(_comb2(table.counts.sum(axis=0)))
    total = table.n * (table.n - 1) // 2
    expected = sum_rows * sum_cols / total
    max_index = (sum_rows + sum_cols) / 2
    if max_index == expected:
        # Both partitions trivial (all-in-one or all singletons) in the same way.
        return 1.0
    return (sum_cells - expected) / (max_index - expected)


class EntropyScores(NamedTuple):
    homogeneity: float
    completeness: float
    v_measure: float
    nmi: float


def _entropy(counts: np.ndarray, n: int) -> float:
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


def entropy_metrics(table: ContingencyTable) -> EntropyScores:
    """Homogeneity, completeness, V-measure and NMI (arithmetic-mean normalized)."""
    n = table.n
    if n < 1:
        raise DomainError("entropy metrics need at least one item")
    counts = table.counts.astype(float)
    h_class = _entropy(counts.sum(axis=1), n)
    h_clust = _entropy(counts.sum(axis=0), n)
    nz = counts > 0
    outer = np.outer(counts.sum(axis=1), counts.sum(axis=0))
    mi = float((counts[nz] / n * np.log(counts[nz] * n / outer[nz])).sum())
    mi = max(mi, 0.0)
    # H(C|K) = H(C) - I and H(K|C) = H(K) - I
    homo = 1.0 if h_class == 0 else 1.0 - (h_class - mi) / h_class
    comp = 1.0 if h_clust == 0 else 1.0 - (h_clust - mi) / h_clust
    homo, comp = min(max(homo, 0.0), 1.0), min(max(comp, 0.0), 1.0)
    v = 0.0 if homo + comp == 0 else 2 * homo * comp / (homo + comp)
    mean_h = (h_class + h_clust) / 2
    if mean_h == 0:
        nmi = 1.0
    else:
        nmi = min(max(mi / mean_h, 0.0), 1.0)
    return EntropyScores(homo, comp, v, nmi)


def modularity(graph: WeightedGraph, pred: Labels, weighted: bool = True) -> float:
    """Newman modularity of a partition; edge weights count unless ``weighted=False``.

    Uses the per-community form sum_c [in_c / 2m - (tot_c / 2m)^2].
    """
    labels = _labels(pred)
    if labels.shape != (graph.n_nodes,):
        raise GraphError(f"partition covers {labels.size} nodes, graph has {graph.n_nodes}")
    if graph.n_edges == 0:
        raise DomainError("modularity is undefined on an edgeless graph")
    A = adjacency(graph)
    if not weighted:
        A = (A > 0).astype(float)
    two_m = A.sum()
    strength = A.sum(axis=1)
    _, comm = np.unique(labels, return_inverse=True)
    onehot = np.zeros((graph.n_nodes, comm.max() + 1))
    onehot[np.arange(graph.n_nodes), comm] = 1.0
    inside = np.einsum("ic,ij,jc->c", onehot, A, onehot)
    total = onehot.T @ strength
    return float((inside / two_m - (total / two_m) ** 2).sum())


@dataclass(frozen=True)
class MetricsReport:
    """Scores of one partition; label-based fields are None without ground truth."""

    ari: Optional[float]
    nmi: Optional[float]
    homogeneity: Optional[float]
    completeness: Optional[float]
    v_measure: Optional[float]
    modularity: Optional[float]
    modularity_unweighted: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)

    def row(self) -> tuple:
        return (self.ari, self.nmi, self.homogeneity, self.completeness,
                self.v_measure, self.modularity, self.modularity_unweighted)


def evaluate(truth: Labels, pred: Labels, graph: Optional[WeightedGraph] = None) -> MetricsReport:
    """All scores for one predicted partition; modularity only when a graph is given."""
    table = contingency(truth, pred)
    scores = entropy_metrics(table)
    q = q_unw = None
    if graph is not None and graph.n_edges:
        q = modularity(graph, pred)
        q_unw = modularity(graph, pred, weighted=False)
    return MetricsReport(adjusted_rand_index(table), scores.nmi, scores.homogeneity,
                         scores.completeness, scores.v_measure, q, q_unw)


def _fmt(x: Optional[float], digits: int = 4) -> str:
    return "-" if x is None else f"{x:.{digits}f}"


_ROW_NAMES = ("ARI", "NMI", "HOMO", "COMP", "V-MES", "Q", "Q(unw)")


def format_table(reports: Mapping[str, MetricsReport]) -> str:
    """Aligned text table: one metric per row, one algorithm per column."""
    names = list(reports)
    width = max([8] + [len(n) for n in names]) + 2
    lines = ["Metric".ljust(8) + "".join(n.rjust(width) for n in names)]
    for i, row_name in enumerate(_ROW_NAMES):
        cells = [_fmt(reports[n].row()[i]) for n in names]
        lines.append(row_name.ljust(8) + "".join(c.rjust(width) for c in cells))
    return "\n".join(lines) + "\n"


def to_csv(reports: Mapping[str, MetricsReport] | Iterable[tuple[str, MetricsReport]]) -> str:
    items = reports.items() if isinstance(reports, Mapping) else reports
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(CSV_COLUMNS)
    for name, rep in items:
        writer.writerow([name] + [_csv_num(x) for x in rep.row()])
    return buf.getvalue()


def _csv_num(x: Optional[float]) -> str:
    if x is None:
        return ""
    if math.isnan(x):
        return "nan"
    return repr(float(x))
