"""Command-line front end.

Subcommands wire the pipeline stages together through JSON files:

    saga ingest TRACE [META] --output window.json
    saga graph WINDOW --output graph.json [--dot graph.dot]
    saga partition GRAPH --output partition.json
    saga plan PARTITION CURRENT --output plan.json [--target-output t.json]
    saga simulate PLACEMENT WINDOW GRAPH --output report.json
    saga simulate --compare BEFORE AFTER --output improvement.json
    saga bench --n 50,100,200 --k 2,4,8 --output bench.csv

Settings come from one JSON config file (--config, or the SAGA_CONFIG
environment variable); command-line flags win over config values. Every
failure class maps to a distinct exit code (see errors.py).

Written JSON carries a ``generated_at_ms`` wall-clock field; apart from that
one field, outputs are byte-deterministic for identical inputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import bench as bench_mod
from .affinity import AffinityWeights
from .errors import (
    EXIT_FILE_NOT_FOUND,
    ConfigError,
    InvalidWindow,
    SagaError,
    SchemaError,
)
from .graph import (
    build_graph,
    graph_from_dict,
    graph_to_dict,
    graph_to_dot,
    total_cut_weight,
    total_internal_weight,
)
from .ingest import (
    aggregate,
    parse_meta,
    parse_trace,
    window_from_dict,
    window_to_dict,
)
from .partition import Partition, partition_k_with_stats
from .placement import (
    LatencyModel,
    assign_clusters,
    compare,
    improvement_csv,
    improvement_to_dict,
    placement_from_dict,
    placement_to_dict,
    plan_migration,
    plan_to_dict,
    sim_report_from_dict,
    sim_report_to_dict,
    simulate,
)

CONFIG_ENV_VAR = "SAGA_CONFIG"

WEIGHT_KEYS = ("data", "privacy", "coupling", "functional", "operational")


@dataclass
class Config:
    """Validated pipeline settings."""

    weights: AffinityWeights = field(default_factory=AffinityWeights)
    k: int | None = None
    window_start: int | None = None
    window_end: int | None = None
    nodes: list[str] = field(default_factory=list)
    latency: LatencyModel = field(default_factory=LatencyModel)
    seed: int | None = None
    restarts: int = 1
    trace_format: str = "jsonl"
    lenient: bool = False
    kernel: str | None = None


def load_config(path: str | None) -> Config:
    """Read and validate the config file; missing path means defaults."""
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR) or None
    if path is None:
        return Config()
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: config must be a JSON object")

    cfg = Config()
    try:
        if "weights" in doc:
            w = doc["weights"]
            unknown = set(w) - set(WEIGHT_KEYS)
            if unknown:
                raise ConfigError(f"unknown weight keys: {sorted(unknown)}")
            cfg.weights = AffinityWeights(**{k: float(v) for k, v in w.items()})
        if doc.get("k") is not None:
            cfg.k = int(doc["k"])
        if "window" in doc and doc["window"] is not None:
            win = doc["window"]
            cfg.window_start = int(win["start"])
            cfg.window_end = int(win["end"])
            if cfg.window_end <= cfg.window_start:
                raise InvalidWindow(cfg.window_start, cfg.window_end)
        if "nodes" in doc and doc["nodes"] is not None:
            cfg.nodes = [str(n) for n in doc["nodes"]]
            if any(not n for n in cfg.nodes):
                raise ConfigError("node names must be non-empty")
            if len(set(cfg.nodes)) != len(cfg.nodes):
                raise ConfigError("node names must be unique")
        if "latency_model" in doc and doc["latency_model"] is not None:
            lm = doc["latency_model"]
            cfg.latency = LatencyModel(
                local_ms=float(lm.get("local_ms", 0.5)),
                remote_ms=float(lm.get("remote_ms", 5.0)),
            )
        if doc.get("seed") is not None:
            cfg.seed = int(doc["seed"])
        if doc.get("restarts") is not None:
            cfg.restarts = int(doc["restarts"])
        if doc.get("trace_format") is not None:
            cfg.trace_format = str(doc["trace_format"])
            if cfg.trace_format not in ("jsonl", "csv"):
                raise ConfigError(f"trace_format must be jsonl or csv, got {cfg.trace_format!r}")
        cfg.lenient = bool(doc.get("lenient", False))
        if doc.get("kernel") is not None:
            cfg.kernel = str(doc["kernel"])
            if cfg.kernel not in ("numba", "numpy", "auto"):
                raise ConfigError(f"kernel must be numba, numpy or auto, got {cfg.kernel!r}")
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return cfg


# ---------------------------------------------------------------------------
# file helpers

def _write_json(path: str | None, doc: dict) -> None:
    stamped = {"generated_at_ms": int(time.time() * 1000), **doc}
    text = json.dumps(stamped, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(path, f"invalid JSON: {exc.msg}") from exc


def _load(path: str, loader, what: str):
    doc = _read_json(path)
    try:
        return loader(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(path, f"not a valid {what} file: {exc}") from exc


def _info(message: str) -> None:
    print(message, file=sys.stderr)


# ---------------------------------------------------------------------------
# subcommands

def cmd_ingest(args, cfg: Config) -> int:
    fmt = args.trace_format or cfg.trace_format
    lenient = args.lenient or cfg.lenient
    with open(args.trace, "rb") as fh:
        result = parse_trace(fh, format=fmt, lenient=lenient)
    if result.skipped:
        _info(f"warning: skipped {result.skipped} malformed line(s)")

    meta = {}
    if args.meta is not None:
        with open(args.meta, "rb") as fh:
            meta = parse_meta(fh)

    start = args.window_start if args.window_start is not None else cfg.window_start
    end = args.window_end if args.window_end is not None else cfg.window_end
    if start is None or end is None:
        # Default to the full span of the parsed records.
        stamps = [r.timestamp for r in result.records]
        start = min(stamps) if start is None and stamps else (start or 0)
        end = (max(stamps) + 1) if end is None and stamps else (end if end is not None else 1)

    win = aggregate(result.records, start, end, declared_services=meta.keys())
    if win.is_empty:
        _info(f"warning: window [{start}, {end}) contains no records (EmptyWindow)")

    _write_json(args.output, window_to_dict(win, meta))
    if args.output:
        _info(
            f"wrote window [{start}, {end}) with {len(win.services)} services, "
            f"{len(win.pair_bytes)} pairs to {args.output}"
        )
    return 0


def cmd_graph(args, cfg: Config) -> int:
    win, meta = _load(args.window, window_from_dict, "window")
    g = build_graph(win, meta, cfg.weights)
    _write_json(args.output, graph_to_dict(g))
    if args.dot:
        _write_text(args.dot, graph_to_dot(g))
    if args.output:
        _info(f"wrote graph with {len(g.vertices)} vertices, {len(g.edges)} edges to {args.output}")
    return 0


def cmd_partition(args, cfg: Config) -> int:
    def load_graph(doc):
        return graph_from_dict(doc)

    g = _load(args.graph, load_graph, "graph")
    k = args.k if args.k is not None else cfg.k
    if k is None:
        raise ConfigError("no subset count: set k in the config or pass --k")
    kernel = args.kernel or cfg.kernel
    part, stats = partition_k_with_stats(
        g, k, kernel=kernel, seed=cfg.seed, restarts=cfg.restarts
    )
    doc = {
        "k": part.k,
        "subsets": [list(s) for s in part.subsets],
        "cut_weight": total_cut_weight(g, part),
        "internal_weight": total_internal_weight(g, part),
        "bisections": stats.bisections,
    }
    _write_json(args.output, doc)
    if args.output:
        _info(
            f"partitioned {len(g.vertices)} services into {part.k} subsets "
            f"(cut {doc['cut_weight']:.6g}) -> {args.output}"
        )
    return 0


def cmd_plan(args, cfg: Config) -> int:
    part_doc = _read_json(args.partition)
    try:
        part = Partition.from_sets(part_doc["subsets"])
    except (KeyError, TypeError) as exc:
        raise SchemaError(args.partition, f"not a valid partition file: {exc}") from exc
    current = _load(args.current, placement_from_dict, "placement")

    nodes = cfg.nodes or list(current.nodes)
    target = assign_clusters(part, nodes)
    plan = plan_migration(current, target)
    _write_json(args.output, plan_to_dict(plan, target=target))
    if args.target_output:
        _write_json(args.target_output, placement_to_dict(target))
    if args.output:
        _info(
            f"plan: {len(plan.moves)} move(s), {plan.unchanged_count} unchanged -> {args.output}"
        )
    return 0


def cmd_simulate(args, cfg: Config) -> int:
    if args.compare:
        before_path, after_path = args.compare
        before = _load(before_path, sim_report_from_dict, "simulation report")
        after = _load(after_path, sim_report_from_dict, "simulation report")
        report = compare(before, after)
        if args.format == "csv":
            _write_text(args.output, improvement_csv(before, after))
        else:
            _write_json(args.output, improvement_to_dict(report))
        if args.output:
            _info(f"comparison -> {args.output}")
        return 0

    if not (args.placement and args.window and args.graph):
        raise ConfigError("simulate needs PLACEMENT WINDOW GRAPH (or --compare BEFORE AFTER)")
    pl = _load(args.placement, placement_from_dict, "placement")
    win, _ = _load(args.window, window_from_dict, "window")
    g = _load(args.graph, graph_from_dict, "graph")
    report = simulate(pl, win, g, cfg.latency)
    _write_json(args.output, sim_report_to_dict(report))
    if args.output:
        _info(
            f"simulated: {report.inter_node_bytes} inter-node bytes, "
            f"est {report.est_mean_latency_ms:.3f} ms -> {args.output}"
        )
    return 0


def cmd_bench(args, cfg: Config) -> int:
    n_list = [int(x) for x in args.n.split(",") if x]
    k_list = [int(x) for x in args.k.split(",") if x]
    kernel = args.kernel or cfg.kernel
    rows = list(
        bench_mod.run_grid(
            n_list,
            k_list,
            repeats=args.repeats,
            base_seed=cfg.seed or 0,
            kernel=kernel,
        )
    )
    _write_text(args.output, bench_mod.grid_csv(rows))
    if args.output:
        _info(f"bench: {len(rows)} rows -> {args.output}")
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="saga",
        description="Service-affinity graph partitioning and placement pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"config JSON path (or ${CONFIG_ENV_VAR})")
    common.add_argument("--output", help="output path (default: stdout)")

    p = sub.add_parser("ingest", parents=[common], help="aggregate a trace into a metrics window")
    p.add_argument("trace", help="trace file (JSONL or CSV)")
    p.add_argument("meta", nargs="?", help="service metadata JSON file")
    p.add_argument("--trace-format", choices=["jsonl", "csv"], help="trace file format")
    p.add_argument("--lenient", action="store_true", help="skip malformed lines instead of failing")
    p.add_argument("--window-start", type=int, help="window start (ms, inclusive)")
    p.add_argument("--window-end", type=int, help="window end (ms, exclusive)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("graph", parents=[common], help="build the affinity graph from a window")
    p.add_argument("window", help="window JSON file from 'saga ingest'")
    p.add_argument("--dot", help="also write a Graphviz DOT rendering here")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("partition", parents=[common], help="split the graph into k balanced subsets")
    p.add_argument("graph", help="graph JSON file from 'saga graph'")
    p.add_argument("--k", type=int, help="number of subsets (overrides config)")
    p.add_argument("--kernel", choices=["numba", "numpy", "auto"], help="swap-scan kernel")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("plan", parents=[common], help="plan migrations toward a partition")
    p.add_argument("partition", help="partition JSON file")
    p.add_argument("current", help="current placement JSON file")
    p.add_argument("--target-output", help="also write the target placement here")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("simulate", parents=[common], help="replay a window against a placement")
    p.add_argument("placement", nargs="?", help="placement JSON file")
    p.add_argument("window", nargs="?", help="window JSON file")
    p.add_argument("graph", nargs="?", help="graph JSON file")
    p.add_argument("--compare", nargs=2, metavar=("BEFORE", "AFTER"),
                   help="compare two simulation reports instead")
    p.add_argument("--format", choices=["json", "csv"], default="json",
                   help="output format for --compare")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", parents=[common], help="time the partitioner over an (n, k) grid")
    p.add_argument("--n", required=True, help="comma-separated vertex counts, e.g. 50,100,200")
    p.add_argument("--k", required=True, help="comma-separated subset counts, e.g. 2,4,8")
    p.add_argument("--repeats", type=int, default=1, help="timings per cell")
    p.add_argument("--kernel", choices=["numba", "numpy", "auto"], help="swap-scan kernel")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except SagaError as exc:
        print(f"error[{type(exc).__name__}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"error[FileNotFound]: {exc}", file=sys.stderr)
        return EXIT_FILE_NOT_FOUND


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
