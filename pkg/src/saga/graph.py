"""Undirected weighted affinity graph.

Vertices are the window's services (sorted); edges exist exactly for the
pairs that exchanged traffic. Each edge keeps its raw affinity score and a
min-max normalized weight in [0, 1], computed over the existing edges only.

When every raw score is equal (including the single-edge case) the
normalization is degenerate and every weight is set to 1.0, keeping all
edges relevant to the cut objective.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .affinity import AffinityBreakdown, AffinityWeights, combined_affinity
from .errors import InvalidPartition, UnknownVertex
from .ingest import MetricsWindow, ServiceId, ServiceMeta, canonical_pair

Pair = tuple[ServiceId, ServiceId]


@dataclass(frozen=True)
class EdgeData:
    raw: float
    weight: float
    breakdown: AffinityBreakdown | None = None


@dataclass(frozen=True)
class AffinityGraph:
    vertices: tuple[ServiceId, ...]
    edges: dict[Pair, EdgeData]
    window: MetricsWindow | None = None

    def __post_init__(self):
        vset = set(self.vertices)
        for u, v in self.edges:
            if u == v:
                raise InvalidPartition(f"self-loop on {u!r}")
            if u not in vset or v not in vset:
                raise UnknownVertex(u if u not in vset else v)

    def edge_weight(self, u: ServiceId, v: ServiceId) -> float:
        """Normalized weight of the (u, v) edge; 0 for non-adjacent pairs."""
        vset = set(self.vertices)
        if u not in vset:
            raise UnknownVertex(u)
        if v not in vset:
            raise UnknownVertex(v)
        edge = self.edges.get(canonical_pair(u, v))
        return edge.weight if edge is not None else 0.0

    def weight_matrix(self) -> np.ndarray:
        """Dense symmetric weight matrix in vertex order; zero diagonal."""
        index = {v: i for i, v in enumerate(self.vertices)}
        w = np.zeros((len(self.vertices), len(self.vertices)), dtype=np.float64)
        for (u, v), edge in self.edges.items():
            i, j = index[u], index[v]
            w[i, j] = edge.weight
            w[j, i] = edge.weight
        return w

    def total_edge_weight(self) -> float:
        return float(sum(self.edges[key].weight for key in sorted(self.edges)))


def _normalize(raw: Mapping[Pair, float]) -> dict[Pair, float]:
    if not raw:
        return {}
    values = [raw[key] for key in sorted(raw)]
    lo, hi = min(values), max(values)
    if hi == lo:
        return {key: 1.0 for key in raw}
    span = hi - lo
    return {key: (value - lo) / span for key, value in raw.items()}


def build_graph(
    win: MetricsWindow,
    meta: Mapping[ServiceId, ServiceMeta],
    weights: AffinityWeights,
) -> AffinityGraph:
    """Build the affinity graph for a metrics window.

    Tag affinities only modulate the weight of traffic edges; they never
    create an edge between services that exchanged nothing.
    """
    vertices = tuple(sorted(win.services))
    raw: dict[Pair, float] = {}
    breakdowns: dict[Pair, AffinityBreakdown] = {}
    for u, v in win.sorted_pairs():
        bd = combined_affinity(u, v, win, meta, weights)
        raw[(u, v)] = bd.combined
        breakdowns[(u, v)] = bd
    normalized = _normalize(raw)
    edges = {
        key: EdgeData(raw=raw[key], weight=normalized[key], breakdown=breakdowns[key])
        for key in sorted(raw)
    }
    return AffinityGraph(vertices=vertices, edges=edges, window=win)


def from_edge_weights(
    vertices: Iterable[ServiceId],
    weights: Mapping[Pair, float],
    normalize: bool = False,
) -> AffinityGraph:
    """Build a graph directly from explicit edge values.

    With ``normalize=True`` the values are treated as raw affinities and
    min-max scaled; otherwise they are used verbatim as edge weights.
    Used by the benchmark harness and tests.
    """
    canon = {canonical_pair(u, v): float(w) for (u, v), w in weights.items()}
    final = _normalize(canon) if normalize else canon
    edges = {
        key: EdgeData(raw=canon[key], weight=final[key]) for key in sorted(canon)
    }
    return AffinityGraph(vertices=tuple(sorted(vertices)), edges=edges, window=None)


def random_affinity_graph(n: int, edge_prob: float = 0.1, seed: int = 0) -> AffinityGraph:
    """Seeded Erdos-Renyi graph with uniform raw affinities, normalized.

    Vertex names are zero-padded so lexicographic and numeric order agree.
    """
    rng = np.random.default_rng(seed)
    width = len(str(max(n - 1, 0)))
    names = [f"s{i:0{width}d}" for i in range(n)]
    weights: dict[Pair, float] = {}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < edge_prob:
                weights[(names[i], names[j])] = float(rng.random())
    return from_edge_weights(names, weights, normalize=True)


def _subset_index(g: AffinityGraph, subsets: Iterable[Iterable[ServiceId]]) -> dict[ServiceId, int]:
    membership: dict[ServiceId, int] = {}
    for i, subset in enumerate(subsets):
        for v in subset:
            if v in membership:
                raise InvalidPartition(f"service {v!r} appears in more than one subset")
            membership[v] = i
    missing = set(g.vertices) - membership.keys()
    if missing:
        raise InvalidPartition(f"services not covered by the partition: {sorted(missing)}")
    extra = membership.keys() - set(g.vertices)
    if extra:
        raise InvalidPartition(f"partition contains unknown services: {sorted(extra)}")
    return membership


def total_cut_weight(g: AffinityGraph, subsets: Iterable[Iterable[ServiceId]]) -> float:
    """Sum of weights of edges whose endpoints lie in different subsets."""
    membership = _subset_index(g, subsets)
    cut = 0.0
    for u, v in sorted(g.edges):
        if membership[u] != membership[v]:
            cut += g.edges[(u, v)].weight
    return cut


def total_internal_weight(g: AffinityGraph, subsets: Iterable[Iterable[ServiceId]]) -> float:
    """Sum of weights of edges kept inside a subset."""
    membership = _subset_index(g, subsets)
    kept = 0.0
    for u, v in sorted(g.edges):
        if membership[u] == membership[v]:
            kept += g.edges[(u, v)].weight
    return kept


# ---------------------------------------------------------------------------
# serialization

def graph_to_dict(g: AffinityGraph) -> dict:
    from .ingest import window_to_dict

    edges = []
    for u, v in sorted(g.edges):
        edge = g.edges[(u, v)]
        bd = None
        if edge.breakdown is not None:
            bd = {
                "data": edge.breakdown.data,
                "privacy": edge.breakdown.privacy,
                "coupling": edge.breakdown.coupling,
                "functional": edge.breakdown.functional,
                "operational": edge.breakdown.operational,
                "combined": edge.breakdown.combined,
            }
        edges.append({"u": u, "v": v, "raw": edge.raw, "weight": edge.weight, "breakdown": bd})
    return {
        "vertices": list(g.vertices),
        "edges": edges,
        "window": window_to_dict(g.window) if g.window is not None else None,
    }


def graph_from_dict(doc: dict) -> AffinityGraph:
    from .ingest import window_from_dict

    edges = {}
    for e in doc["edges"]:
        bd = e.get("breakdown")
        breakdown = AffinityBreakdown(**bd) if bd is not None else None
        edges[canonical_pair(e["u"], e["v"])] = EdgeData(
            raw=e["raw"], weight=e["weight"], breakdown=breakdown
        )
    window = None
    if doc.get("window") is not None:
        window, _ = window_from_dict(doc["window"])
    return AffinityGraph(vertices=tuple(doc["vertices"]), edges=edges, window=window)


def graph_to_dot(g: AffinityGraph) -> str:
    """Graphviz rendering with weights as edge labels."""
    lines = ["graph affinity {"]
    for v in g.vertices:
        lines.append(f'  "{v}";')
    for u, v in sorted(g.edges):
        w = g.edges[(u, v)].weight
        lines.append(f'  "{u}" -- "{v}" [weight={w:.6g}, label="{w:.3f}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
