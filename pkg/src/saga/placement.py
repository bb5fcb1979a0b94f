"""Placement planning and simulation.

Turns a partition into a node assignment, diffs placements into migration
plans, and estimates how a placement performs on a recorded traffic window:
bytes crossing node boundaries plus a message-weighted latency proxy with a
two-level cost model (local vs remote per message).

No actual migration happens here; plans and reports are plain data.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import (
    NodeCountMismatch,
    ServiceSetMismatch,
    UnassignedService,
)
from .graph import AffinityGraph, total_cut_weight
from .ingest import MetricsWindow, ServiceId
from .partition import Partition

NodeId = str


@dataclass(frozen=True)
class Placement:
    """Assignment of every service to exactly one node."""

    nodes: tuple[NodeId, ...]
    assignment: dict[ServiceId, NodeId]

    def __post_init__(self):
        known = set(self.nodes)
        for service, node in self.assignment.items():
            if node not in known:
                raise ValueError(f"service {service!r} assigned to unknown node {node!r}")

    def services(self) -> frozenset[ServiceId]:
        return frozenset(self.assignment)


@dataclass(frozen=True)
class Move:
    service: ServiceId
    from_node: NodeId
    to_node: NodeId


@dataclass(frozen=True)
class MigrationPlan:
    moves: tuple[Move, ...]
    unchanged_count: int

    def apply_to(self, current: Placement) -> Placement:
        assignment = dict(current.assignment)
        for move in self.moves:
            assignment[move.service] = move.to_node
        nodes = tuple(dict.fromkeys([*current.nodes, *(m.to_node for m in self.moves)]))
        return Placement(nodes=nodes, assignment=assignment)


@dataclass(frozen=True)
class LatencyModel:
    """Constant per-message cost: local when both endpoints share a node."""

    local_ms: float = 0.5
    remote_ms: float = 5.0

    def __post_init__(self):
        if not (self.remote_ms >= self.local_ms >= 0):
            raise ValueError(
                f"need remote_ms >= local_ms >= 0, got local={self.local_ms} remote={self.remote_ms}"
            )


@dataclass(frozen=True)
class PairTraffic:
    pair: tuple[ServiceId, ServiceId]
    bytes: int
    local: bool


@dataclass(frozen=True)
class SimReport:
    inter_node_bytes: int
    intra_node_bytes: int
    cut_weight: float
    est_mean_latency_ms: float
    per_pair: tuple[PairTraffic, ...]


@dataclass(frozen=True)
class ImprovementReport:
    """Before-vs-after percentage deltas; None where the baseline is zero."""

    latency_delta_pct: float | None
    inter_bytes_delta_pct: float | None
    cut_delta_pct: float | None

    @property
    def undefined_fields(self) -> tuple[str, ...]:
        names = ("latency_delta_pct", "inter_bytes_delta_pct", "cut_delta_pct")
        return tuple(n for n in names if getattr(self, n) is None)


def assign_clusters(p: Partition, nodes: Sequence[NodeId]) -> Placement:
    """Map subset i (canonical order) onto nodes[i]."""
    if len(nodes) != p.k:
        raise NodeCountMismatch(p.k, len(nodes))
    assignment = {
        service: nodes[i] for i, subset in enumerate(p.subsets) for service in subset
    }
    return Placement(nodes=tuple(nodes), assignment=assignment)


def plan_migration(current: Placement, target: Placement) -> MigrationPlan:
    """List the services whose node differs between two placements."""
    if current.services() != target.services():
        raise ServiceSetMismatch(
            only_current=set(current.services() - target.services()),
            only_target=set(target.services() - current.services()),
        )
    moves = []
    unchanged = 0
    for service in sorted(current.assignment):
        src = current.assignment[service]
        dst = target.assignment[service]
        if src != dst:
            moves.append(Move(service=service, from_node=src, to_node=dst))
        else:
            unchanged += 1
    return MigrationPlan(moves=tuple(moves), unchanged_count=unchanged)


def induced_partition(pl: Placement, vertices: Sequence[ServiceId]) -> Partition:
    """Group ``vertices`` by their assigned node (empty nodes drop out)."""
    groups: dict[NodeId, list[ServiceId]] = {}
    for v in vertices:
        node = pl.assignment.get(v)
        if node is None:
            raise UnassignedService(v)
        groups.setdefault(node, []).append(v)
    return Partition.from_sets(groups.values())


def simulate(
    pl: Placement,
    win: MetricsWindow,
    g: AffinityGraph,
    model: LatencyModel,
) -> SimReport:
    """Estimate inter-node traffic and mean per-message latency for a
    placement replaying the window's traffic.

    A pair is local iff both endpoints share a node. The latency estimate
    weights each pair by its message count; a window with no messages
    reports 0.
    """
    for service in sorted(win.services):
        if service not in pl.assignment:
            raise UnassignedService(service)

    inter = 0
    intra = 0
    latency_sum = 0.0
    per_pair = []
    for u, v in win.sorted_pairs():
        local = pl.assignment[u] == pl.assignment[v]
        nbytes = win.pair_bytes[(u, v)]
        messages = win.pair_messages[(u, v)]
        if local:
            intra += nbytes
        else:
            inter += nbytes
        latency_sum += messages * (model.local_ms if local else model.remote_ms)
        per_pair.append(PairTraffic(pair=(u, v), bytes=nbytes, local=local))

    est = latency_sum / win.total_messages if win.total_messages > 0 else 0.0
    cut = total_cut_weight(g, induced_partition(pl, g.vertices))
    return SimReport(
        inter_node_bytes=inter,
        intra_node_bytes=intra,
        cut_weight=cut,
        est_mean_latency_ms=est,
        per_pair=tuple(per_pair),
    )


def _delta_pct(before: float, after: float) -> float | None:
    if before == 0:
        return None
    return 100.0 * (before - after) / before


def compare(before: SimReport, after: SimReport) -> ImprovementReport:
    """Percentage improvements of ``after`` over ``before`` (positive means
    better). Fields with a zero baseline come back as None."""
    return ImprovementReport(
        latency_delta_pct=_delta_pct(before.est_mean_latency_ms, after.est_mean_latency_ms),
        inter_bytes_delta_pct=_delta_pct(before.inter_node_bytes, after.inter_node_bytes),
        cut_delta_pct=_delta_pct(before.cut_weight, after.cut_weight),
    )


# ---------------------------------------------------------------------------
# serialization

def placement_to_dict(pl: Placement) -> dict:
    return {
        "nodes": list(pl.nodes),
        "assignment": {s: pl.assignment[s] for s in sorted(pl.assignment)},
    }


def placement_from_dict(doc: dict) -> Placement:
    return Placement(nodes=tuple(doc["nodes"]), assignment=dict(doc["assignment"]))


def plan_to_dict(plan: MigrationPlan, target: Placement | None = None) -> dict:
    doc = {
        "moves": [
            {"service": m.service, "from": m.from_node, "to": m.to_node}
            for m in plan.moves
        ],
        "unchanged_count": plan.unchanged_count,
    }
    if target is not None:
        doc["target"] = placement_to_dict(target)
    return doc


def plan_from_dict(doc: dict) -> tuple[MigrationPlan, Placement | None]:
    plan = MigrationPlan(
        moves=tuple(
            Move(service=m["service"], from_node=m["from"], to_node=m["to"])
            for m in doc["moves"]
        ),
        unchanged_count=doc["unchanged_count"],
    )
    target = placement_from_dict(doc["target"]) if doc.get("target") else None
    return plan, target


def sim_report_to_dict(report: SimReport) -> dict:
    return {
        "inter_node_bytes": report.inter_node_bytes,
        "intra_node_bytes": report.intra_node_bytes,
        "cut_weight": report.cut_weight,
        "est_mean_latency_ms": report.est_mean_latency_ms,
        "per_pair": [
            {"pair": list(p.pair), "bytes": p.bytes, "local": p.local}
            for p in report.per_pair
        ],
    }


def sim_report_from_dict(doc: dict) -> SimReport:
    return SimReport(
        inter_node_bytes=doc["inter_node_bytes"],
        intra_node_bytes=doc["intra_node_bytes"],
        cut_weight=doc["cut_weight"],
        est_mean_latency_ms=doc["est_mean_latency_ms"],
        per_pair=tuple(
            PairTraffic(pair=(p["pair"][0], p["pair"][1]), bytes=p["bytes"], local=p["local"])
            for p in doc["per_pair"]
        ),
    )


def improvement_to_dict(rep: ImprovementReport) -> dict:
    return {
        "latency_delta_pct": rep.latency_delta_pct,
        "inter_bytes_delta_pct": rep.inter_bytes_delta_pct,
        "cut_delta_pct": rep.cut_delta_pct,
        "undefined_fields": list(rep.undefined_fields),
    }


def improvement_csv(before: SimReport, after: SimReport) -> str:
    """Two-row CSV (before/after) for plotting tools."""
    header = "label,est_mean_latency_ms,inter_node_bytes,intra_node_bytes,cut_weight"
    rows = [header]
    for label, rep in (("before", before), ("after", after)):
        rows.append(
            f"{label},{rep.est_mean_latency_ms!r},{rep.inter_node_bytes},"
            f"{rep.intra_node_bytes},{rep.cut_weight!r}"
        )
    return "\n".join(rows) + "\n"
