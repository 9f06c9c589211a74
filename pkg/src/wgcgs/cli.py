"""Command-line entry point: ``wgcgs cluster`` and ``wgcgs compare``."""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .baselines import girvan_newman, greedy_modularity, label_propagation, leading_eigenvector
from .graph import (DomainError, GraphError, WeightedGraph, export_dot, karate_club,
                    read_edge_list, to_edge_list)
from .metrics import MetricsReport, evaluate, format_table, modularity, to_csv
from .train import TrainConfig, train

ALGORITHM_NAMES = ("pl", "mom", "ecm", "eb", "wgcgs")


def _default_seed() -> int:
    raw = os.environ.get("WGCGS_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"WGCGS_SEED must be an integer, got {raw!r}")


def _dump_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _timestamp() -> str:
    # SOURCE_DATE_EPOCH pins the manifest time for reproducible output.
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = (datetime.fromtimestamp(int(epoch), tz=timezone.utc) if epoch
            else datetime.now(timezone.utc))
    return when.strftime("%Y-%m-%dT%H:%M:%SZ")


def _load_dataset(args) -> tuple[WeightedGraph, str]:
    if args.karate:
        return karate_club(), "karate"
    return read_edge_list(args.input, args.labels), str(args.input)


def _dataset_hash(graph: WeightedGraph) -> str:
    h = hashlib.sha256(to_edge_list(graph).encode("utf-8"))
    if graph.node_labels is not None:
        h.update(("\n".join(map(str, graph.node_labels))).encode("utf-8"))
    return h.hexdigest()


def _add_dataset_flags(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", type=Path, help="edge-list file: 'u v [w]' per line")
    src.add_argument("--karate", action="store_true",
                     help="use the bundled weighted karate club network")
    p.add_argument("--labels", type=Path,
                   help="ground-truth labels, one integer per line (with --input)")
    p.add_argument("--out", type=Path, default=Path("wgcgs-out"), help="output directory")


def _add_train_flags(p: argparse.ArgumentParser) -> None:
    d = TrainConfig()
    p.add_argument("--k", type=int, default=2, help="number of clusters")
    p.add_argument("--seed", type=int, default=None,
                   help="master seed (default: $WGCGS_SEED or 0)")
    p.add_argument("--epochs", type=int, default=d.epochs)
    p.add_argument("--lr", type=float, default=d.learning_rate)
    p.add_argument("--tau-start", type=float, default=d.tau_start)
    p.add_argument("--tau-end", type=float, default=d.tau_end)
    p.add_argument("--anneal", choices=("exponential", "linear", "constant"), default=d.anneal)
    p.add_argument("--optimizer", choices=("adam", "sgd"), default=d.optimizer)
    p.add_argument("--no-rescale", dest="rescale", action="store_false",
                   help="feed raw cluster strengths to the softmax")
    p.add_argument("--select", choices=("loss", "modularity"), default=d.selection,
                   help="criterion for picking the best restart")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wgcgs", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    cl = sub.add_parser("cluster", help="train WGCGS on one graph")
    _add_dataset_flags(cl)
    _add_train_flags(cl)
    cl.add_argument("--restarts", type=int, default=TrainConfig().restarts)
    cl.add_argument("--dot", action="store_true", help="also write clusters.dot")

    cmp_ = sub.add_parser("compare", help="score WGCGS against the baselines")
    _add_dataset_flags(cmp_)
    _add_train_flags(cmp_)
    cmp_.add_argument("--algorithms", default=",".join(ALGORITHM_NAMES),
                      help="comma-separated subset of " + ",".join(ALGORITHM_NAMES))
    cmp_.add_argument("--seeds", type=int, default=10,
                      help="seeds for stochastic algorithms (WGCGS restarts, PL runs)")
    return parser


def _config(args, restarts: int) -> TrainConfig:
    seed = args.seed if args.seed is not None else _default_seed()
    return TrainConfig(epochs=args.epochs, learning_rate=args.lr, tau_start=args.tau_start,
                       tau_end=args.tau_end, anneal=args.anneal, seed=seed,
                       optimizer=args.optimizer, restarts=restarts, rescale=args.rescale,
                       selection=args.select)


def _report(graph: WeightedGraph, assignment) -> MetricsReport:
    if graph.node_labels is not None:
        return evaluate(graph.node_labels, assignment, graph)
    q = modularity(graph, assignment) if graph.n_edges else None
    q_unw = modularity(graph, assignment, weighted=False) if graph.n_edges else None
    return MetricsReport(None, None, None, None, None, q, q_unw)


def cmd_cluster(args) -> int:
    graph, dataset = _load_dataset(args)
    config = _config(args, args.restarts)
    if args.k == 1:
        print("warning: k=1 is a degenerate run; every node lands in one cluster",
              file=sys.stderr)
    report = train(graph, args.k, config)
    assignment = report.assignment

    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    files = {"assignment": "assignment.json", "training": "training.json"}
    _dump_json(out / files["assignment"],
               {"k": assignment.k, "cluster_of": list(assignment.cluster_of),
                "clusters": assignment.clusters()})
    _dump_json(out / files["training"], report.to_dict())

    metrics = _report(graph, assignment)
    if graph.node_labels is not None:
        files["metrics"] = "metrics.json"
        _dump_json(out / files["metrics"], metrics.to_dict())
    if args.dot:
        files["dot"] = "clusters.dot"
        (out / files["dot"]).write_text(export_dot(graph, assignment), encoding="utf-8")

    manifest = {
        "command": args.argv,
        "config": config.to_dict(),
        "k": args.k,
        "dataset": {"id": dataset, "sha256": _dataset_hash(graph),
                    "n_nodes": graph.n_nodes, "n_edges": graph.n_edges},
        "results": {"assignment": list(assignment.cluster_of),
                    "metrics": metrics.to_dict() if graph.node_labels is not None else None,
                    "final_loss": report.final_loss,
                    "best_restart": report.best_restart,
                    "restart_final_losses": [r.final_loss for r in report.runs]},
        "files": files,
        "timestamp": _timestamp(),
    }
    _dump_json(out / "manifest.json", manifest)

    sys.stdout.write(format_table({f"WGCGS({args.k}C)": metrics}))
    print(f"final loss {report.final_loss:.6f} (restart {report.best_restart}); "
          f"outputs in {out}")
    return 0


def _parse_algorithms(raw: str, parser: argparse.ArgumentParser) -> list[str]:
    names = [a.strip().lower() for a in raw.split(",") if a.strip()]
    if not names:
        parser.error("--algorithms: empty algorithm list")
    unknown = [a for a in names if a not in ALGORITHM_NAMES]
    if unknown:
        parser.error(f"--algorithms: unknown algorithm(s) {', '.join(unknown)}; "
                     f"choose from {', '.join(ALGORITHM_NAMES)}")
    return list(dict.fromkeys(names))


def cmd_compare(args, parser) -> int:
    algorithms = _parse_algorithms(args.algorithms, parser)
    if args.seeds < 1:
        parser.error("--seeds must be >= 1")
    graph, dataset = _load_dataset(args)
    config = _config(args, args.seeds)

    assignments = {}
    for name in algorithms:
        if name == "wgcgs":
            assignments[f"WGCGS({args.k}C)"] = train(graph, args.k, config).assignment
        elif name == "pl":
            runs = [label_propagation(graph, config.seed + s) for s in range(args.seeds)]
            assignments["PL"] = max(runs, key=lambda r: r.modularity).assignment
        elif name == "mom":
            assignments["MOM"] = greedy_modularity(graph).assignment
        elif name == "ecm":
            assignments["ECM"] = leading_eigenvector(graph, args.k).assignment
        elif name == "eb":
            assignments["EB"] = girvan_newman(graph, args.k).assignment

    reports = {name: _report(graph, a) for name, a in assignments.items()}
    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    (out / "comparison.csv").write_text(to_csv(reports), encoding="utf-8", newline="")
    _dump_json(out / "comparison.json", {
        "dataset": {"id": dataset, "sha256": _dataset_hash(graph)},
        "config": config.to_dict(),
        "k": args.k,
        "results": {name: {"metrics": reports[name].to_dict(),
                           "assignment": list(a.cluster_of)}
                    for name, a in assignments.items()},
    })
    sys.stdout.write(format_table(reports))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    args.argv = argv
    try:
        if args.command == "cluster":
            return cmd_cluster(args)
        return cmd_compare(args, parser)
    except (GraphError, DomainError, OSError) as exc:
        print(f"wgcgs: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
