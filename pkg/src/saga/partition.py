"""Balanced k-way partitioning of the affinity graph.

The partitioner repeatedly bisects the largest subset until k subsets exist.
Each bisection is an iterative-improvement loop: a pass tentatively swaps
floor(m/2) vertex pairs across the cut (see ``kernels``), the best prefix of
those swaps is committed when its accumulated gain is positive, and passes
repeat until no positive prefix remains.

Everything is deterministic: the seed bipartition puts the lexicographically
first half of the subset on side 0, gain ties prefer the smallest vertex,
and the largest-subset tie prefers the subset with the smallest first
member. A random-restart mode (explicit seed, best-of-n candidate splits)
is available for quality experiments.

``oracle_min_kcut`` solves small instances exactly by enumeration and backs
the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    GraphTooLarge,
    InvalidPartition,
    KNonPositive,
    KTooLarge,
    TooFewVertices,
    UnknownVertex,
)
from .graph import AffinityGraph, total_cut_weight
from .ingest import ServiceId
from .kernels import resolve_kernel

MAX_PASSES = 100
ORACLE_VERTEX_LIMIT = 12


@dataclass(frozen=True)
class Partition:
    """Disjoint vertex subsets in canonical order (size desc, then smallest
    member)."""

    subsets: tuple[tuple[ServiceId, ...], ...]

    @classmethod
    def from_sets(cls, subsets: Iterable[Iterable[ServiceId]]) -> "Partition":
        normalized = []
        seen: set[ServiceId] = set()
        for subset in subsets:
            members = tuple(sorted(subset))
            if not members:
                raise InvalidPartition("empty subset")
            overlap = seen.intersection(members)
            if overlap:
                raise InvalidPartition(f"service {sorted(overlap)[0]!r} appears in more than one subset")
            seen.update(members)
            normalized.append(members)
        normalized.sort(key=lambda s: (-len(s), s[0]))
        return cls(subsets=tuple(normalized))

    @property
    def k(self) -> int:
        return len(self.subsets)

    def __iter__(self) -> Iterator[tuple[ServiceId, ...]]:
        return iter(self.subsets)

    def membership(self) -> dict[ServiceId, int]:
        return {v: i for i, subset in enumerate(self.subsets) for v in subset}

    def all_vertices(self) -> tuple[ServiceId, ...]:
        return tuple(sorted(v for subset in self.subsets for v in subset))


@dataclass(frozen=True)
class PassState:
    """Step log of one pass: initial gain potentials, the swap sequence, and
    the chosen prefix. Indices refer to the owning trace's vertex order."""

    d_values: np.ndarray
    gains: np.ndarray
    a_picks: np.ndarray
    b_picks: np.ndarray
    prefix_len: int
    prefix_gain: float
    cut_before: float
    cut_after: float
    accepted: bool


@dataclass
class BisectTrace:
    """Pass-by-pass record of one bisection candidate."""

    vertices: tuple[ServiceId, ...]
    seed_side: np.ndarray
    passes: list[PassState] = field(default_factory=list)


@dataclass
class KLStats:
    bisections: int = 0
    passes: int = 0


def _compute_d(C: np.ndarray, side: np.ndarray) -> np.ndarray:
    """External-minus-internal cost per vertex for the current sides."""
    opposite = side[:, None] != side[None, :]
    return (C * opposite).sum(axis=1) - (C * ~opposite).sum(axis=1)


def _side_cut(C: np.ndarray, side: np.ndarray) -> float:
    ai = np.nonzero(side == 0)[0]
    bj = np.nonzero(side == 1)[0]
    return float(C[np.ix_(ai, bj)].sum())


def _improve_side(
    C: np.ndarray,
    side: np.ndarray,
    kernel_fn,
    trace: BisectTrace | None,
    stats: KLStats | None,
) -> np.ndarray:
    """Run swap passes on ``side`` until no positive prefix gain remains."""
    m = side.size
    steps = m // 2
    # For even m the full swap prefix exchanges A and B wholesale, which is
    # the same bipartition; its gain sum is exactly zero in exact arithmetic
    # but float drift can turn it into a tiny positive no-op, so it is never
    # a candidate.
    prefix_limit = steps - 1 if m % 2 == 0 else steps
    for _ in range(MAX_PASSES):
        d0 = _compute_d(C, side)
        d_for_kernel = d0.copy() if trace is not None else d0
        gains, a_picks, b_picks = kernel_fn(C, side, d_for_kernel, steps)
        prefix = np.cumsum(gains)
        if prefix_limit > 0:
            t = int(np.argmax(prefix[:prefix_limit]))
            prefix_gain = float(prefix[t])
        else:
            t = -1
            prefix_gain = 0.0
        accepted = prefix_gain > 0.0
        if stats is not None:
            stats.passes += 1
        if trace is not None:
            cut_before = _side_cut(C, side)
        if accepted:
            side = side.copy()
            side[a_picks[: t + 1]] = 1
            side[b_picks[: t + 1]] = 0
        if trace is not None:
            trace.passes.append(
                PassState(
                    d_values=d0,
                    gains=gains,
                    a_picks=a_picks,
                    b_picks=b_picks,
                    prefix_len=t + 1,
                    prefix_gain=prefix_gain,
                    cut_before=cut_before,
                    cut_after=_side_cut(C, side),
                    accepted=accepted,
                )
            )
        if not accepted:
            break
    return side


def _seed_side(m: int) -> np.ndarray:
    side = np.zeros(m, dtype=np.int8)
    side[(m + 1) // 2 :] = 1
    return side


def _bisect_matrix(
    C: np.ndarray,
    kernel_fn,
    rng: np.random.Generator | None,
    restarts: int,
    names: tuple[ServiceId, ...],
    traces: list[BisectTrace] | None,
    stats: KLStats | None,
) -> np.ndarray:
    """Bisect the vertices behind matrix C; returns the final side array."""
    m = C.shape[0]
    candidates = [_seed_side(m)]
    if rng is not None:
        base = _seed_side(m)
        for _ in range(max(restarts - 1, 0)):
            candidates.append(base[rng.permutation(m)])

    best_side = None
    best_cut = np.inf
    for seed in candidates:
        trace = None
        if traces is not None:
            trace = BisectTrace(vertices=names, seed_side=seed.copy())
            traces.append(trace)
        side = _improve_side(C, seed, kernel_fn, trace, stats)
        cut = _side_cut(C, side)
        if cut < best_cut:
            best_cut = cut
            best_side = side
    if stats is not None:
        stats.bisections += 1
    return best_side


def kl_bisect(
    g: AffinityGraph,
    vertices: Iterable[ServiceId],
    kernel: str | None = None,
    seed: int | None = None,
    restarts: int = 1,
    traces: list[BisectTrace] | None = None,
) -> tuple[set[ServiceId], set[ServiceId]]:
    """Split ``vertices`` into two balanced halves with locally minimal cut.

    Side A receives ceil(n/2) vertices (the extra one when n is odd). With
    ``seed`` set and ``restarts`` > 1, additional random balanced seeds are
    tried and the best final cut wins; ties keep the earlier candidate.
    """
    names = tuple(sorted(set(vertices)))
    if len(names) < 2:
        raise TooFewVertices(len(names))
    known = set(g.vertices)
    for v in names:
        if v not in known:
            raise UnknownVertex(v)

    index = {v: i for i, v in enumerate(g.vertices)}
    gidx = np.array([index[v] for v in names], dtype=np.int64)
    C = g.weight_matrix()[np.ix_(gidx, gidx)]

    _, kernel_fn = resolve_kernel(kernel)
    rng = np.random.default_rng(seed) if seed is not None and restarts > 1 else None
    side = _bisect_matrix(C, kernel_fn, rng, restarts, names, traces, None)

    a = {names[i] for i in np.nonzero(side == 0)[0]}
    b = {names[i] for i in np.nonzero(side == 1)[0]}
    return a, b


def partition_k_with_stats(
    g: AffinityGraph,
    k: int,
    kernel: str | None = None,
    seed: int | None = None,
    restarts: int = 1,
    traces: list[BisectTrace] | None = None,
) -> tuple[Partition, KLStats]:
    """Partition the graph into k subsets; also report bisection/pass counts."""
    n = len(g.vertices)
    if k < 1:
        raise KNonPositive(k)
    if k > n:
        raise KTooLarge(k, n)

    stats = KLStats()
    if k == 1:
        return Partition.from_sets([g.vertices]), stats

    _, kernel_fn = resolve_kernel(kernel)
    rng = np.random.default_rng(seed) if seed is not None and restarts > 1 else None
    W = g.weight_matrix()
    index = {v: i for i, v in enumerate(g.vertices)}

    subsets: list[tuple[ServiceId, ...]] = [tuple(g.vertices)]
    while len(subsets) < k:
        largest = min(subsets, key=lambda s: (-len(s), s[0]))
        subsets.remove(largest)
        gidx = np.array([index[v] for v in largest], dtype=np.int64)
        C = W[np.ix_(gidx, gidx)]
        side = _bisect_matrix(C, kernel_fn, rng, restarts, largest, traces, stats)
        subsets.append(tuple(largest[i] for i in np.nonzero(side == 0)[0]))
        subsets.append(tuple(largest[i] for i in np.nonzero(side == 1)[0]))

    return Partition.from_sets(subsets), stats


def partition_k(
    g: AffinityGraph,
    k: int,
    kernel: str | None = None,
    seed: int | None = None,
    restarts: int = 1,
) -> Partition:
    """Partition the graph into k balanced subsets minimizing inter-subset
    weight. k=1 returns the whole vertex set; k=|V| returns singletons."""
    part, _ = partition_k_with_stats(g, k, kernel=kernel, seed=seed, restarts=restarts)
    return part


# ---------------------------------------------------------------------------
# exact solver for small instances

def bisection_size_profile(n: int, k: int) -> list[int]:
    """Subset sizes the repeated largest-subset halving produces (desc)."""
    sizes = [n]
    while len(sizes) < k:
        largest = max(sizes)
        sizes.remove(largest)
        sizes.append((largest + 1) // 2)
        sizes.append(largest // 2)
    return sorted(sizes, reverse=True)


def _enum_with_profile(pool: tuple[ServiceId, ...], sizes: tuple[int, ...]):
    """Yield set partitions of ``pool`` whose subset sizes match ``sizes``.

    Each unlabeled partition is produced exactly once: the smallest remaining
    vertex always opens the next subset.
    """
    if not pool:
        yield []
        return
    head, rest = pool[0], pool[1:]
    for size in sorted(set(sizes), reverse=True):
        remaining = list(sizes)
        remaining.remove(size)
        for others in combinations(rest, size - 1):
            subset = (head, *others)
            leftover = tuple(v for v in rest if v not in others)
            for tail in _enum_with_profile(leftover, tuple(remaining)):
                yield [subset, *tail]


def _enum_exact_k(pool: Sequence[ServiceId], k: int):
    """Yield all partitions of ``pool`` into exactly k non-empty subsets."""
    n = len(pool)

    def grow(i: int, blocks: list[list[ServiceId]]):
        if i == n:
            if len(blocks) == k:
                yield [tuple(b) for b in blocks]
            return
        # Pruning: remaining vertices must still be able to open enough blocks.
        if len(blocks) + (n - i) < k:
            return
        v = pool[i]
        for b in blocks:
            b.append(v)
            yield from grow(i + 1, blocks)
            b.pop()
        if len(blocks) < k:
            blocks.append([v])
            yield from grow(i + 1, blocks)
            blocks.pop()

    yield from grow(0, [])


def oracle_min_kcut(
    g: AffinityGraph,
    k: int,
    balance: str = "algorithm1_sizes",
) -> Partition:
    """Exhaustive minimum-weight k-cut for graphs of at most 12 vertices.

    ``balance="algorithm1_sizes"`` restricts the search to the subset-size
    profile the repeated-halving partitioner can produce;
    ``balance="unconstrained"`` searches every partition into k non-empty
    subsets. Cut ties resolve to the canonically smallest partition.
    """
    n = len(g.vertices)
    if n > ORACLE_VERTEX_LIMIT:
        raise GraphTooLarge(n, ORACLE_VERTEX_LIMIT)
    if k < 1:
        raise KNonPositive(k)
    if k > n:
        raise KTooLarge(k, n)
    if balance not in ("algorithm1_sizes", "unconstrained"):
        raise ValueError(f"unknown balance mode {balance!r}")

    pool = tuple(sorted(g.vertices))
    if balance == "algorithm1_sizes":
        profile = tuple(bisection_size_profile(n, k))
        candidates = _enum_with_profile(pool, profile)
    else:
        candidates = _enum_exact_k(pool, k)

    vidx = {v: i for i, v in enumerate(pool)}
    edge_list = [
        (vidx[u], vidx[v], g.edges[(u, v)].weight) for u, v in sorted(g.edges)
    ]

    best_subsets: list[tuple[ServiceId, ...]] | None = None
    best_key: tuple | None = None
    best_cut = np.inf
    mem = [0] * n
    for subsets in candidates:
        for b, subset in enumerate(subsets):
            for v in subset:
                mem[vidx[v]] = b
        cut = 0.0
        for iu, iv, w in edge_list:
            if mem[iu] != mem[iv]:
                cut += w
        if cut > best_cut:
            continue
        key = tuple(sorted(subsets, key=lambda s: (-len(s), s[0])))
        if cut < best_cut or key < best_key:
            best_cut = cut
            best_key = key
            best_subsets = subsets
    assert best_subsets is not None
    return Partition.from_sets(best_subsets)
