"""Service-affinity scoring.

Five per-pair affinity types feed a weighted sum:

  data         share of the window's total bytes exchanged by the pair
  coupling     share of the window's total message count
  privacy      1 when both privacy tags are present and equal, else 0
  functional   same rule over function tags
  operational  same rule over operational tags

Traffic ratios are 0 when the window has no traffic at all (an idle window
still yields a valid, tag-only score). Absent tags never match.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import SameService
from .ingest import MetricsWindow, ServiceId, ServiceMeta, canonical_pair


@dataclass(frozen=True)
class AffinityWeights:
    """Non-negative per-type weights; at least one must be positive."""

    data: float = 1.0
    privacy: float = 1.0
    coupling: float = 1.0
    functional: float = 1.0
    operational: float = 1.0

    def __post_init__(self):
        values = (self.data, self.privacy, self.coupling, self.functional, self.operational)
        if any(w < 0 for w in values):
            raise ValueError(f"affinity weights must be >= 0, got {values}")
        if not any(w > 0 for w in values):
            raise ValueError("at least one affinity weight must be > 0")

    @property
    def total(self) -> float:
        return self.data + self.privacy + self.coupling + self.functional + self.operational


@dataclass(frozen=True)
class AffinityBreakdown:
    """Per-type affinity values for one pair plus their weighted sum."""

    data: float
    privacy: float
    coupling: float
    functional: float
    operational: float
    combined: float


def data_affinity(u: ServiceId, v: ServiceId, win: MetricsWindow) -> float:
    """Fraction of all bytes in the window exchanged between u and v."""
    if u == v:
        raise SameService(u)
    if win.total_bytes == 0:
        return 0.0
    return win.pair_bytes.get(canonical_pair(u, v), 0) / win.total_bytes


def coupling_affinity(u: ServiceId, v: ServiceId, win: MetricsWindow) -> float:
    """Fraction of all messages in the window exchanged between u and v."""
    if u == v:
        raise SameService(u)
    if win.total_messages == 0:
        return 0.0
    return win.pair_messages.get(canonical_pair(u, v), 0) / win.total_messages


def _tags_match(a: str | None, b: str | None) -> float:
    return 1.0 if a is not None and a == b else 0.0


def privacy_affinity(u_meta: ServiceMeta, v_meta: ServiceMeta) -> float:
    return _tags_match(u_meta.privacy_tag, v_meta.privacy_tag)


def functional_affinity(u_meta: ServiceMeta, v_meta: ServiceMeta) -> float:
    return _tags_match(u_meta.function_tag, v_meta.function_tag)


def operational_affinity(u_meta: ServiceMeta, v_meta: ServiceMeta) -> float:
    return _tags_match(u_meta.operational_tag, v_meta.operational_tag)


def combined_affinity(
    u: ServiceId,
    v: ServiceId,
    win: MetricsWindow,
    meta: Mapping[ServiceId, ServiceMeta],
    weights: AffinityWeights,
) -> AffinityBreakdown:
    """Weighted sum of the five affinity types for one service pair.

    Services missing from ``meta`` are treated as having all tags absent, so
    traffic-only deployments work without a metadata file.
    """
    if u == v:
        raise SameService(u)
    u_meta = meta.get(u) or ServiceMeta(id=u)
    v_meta = meta.get(v) or ServiceMeta(id=v)

    d = data_affinity(u, v, win)
    p = privacy_affinity(u_meta, v_meta)
    c = coupling_affinity(u, v, win)
    f = functional_affinity(u_meta, v_meta)
    o = operational_affinity(u_meta, v_meta)
    combined = (
        weights.data * d
        + weights.privacy * p
        + weights.coupling * c
        + weights.functional * f
        + weights.operational * o
    )
    return AffinityBreakdown(data=d, privacy=p, coupling=c, functional=f,
                             operational=o, combined=combined)
