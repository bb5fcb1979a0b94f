"""Runtime-scaling harness for the partitioner.

Times partition_k over an (n, k) grid of seeded synthetic graphs and emits
CSV rows. Graphs are Erdos-Renyi with edge probability 0.1 and uniform
random raw affinities, min-max normalized like production graphs. The
kernel is warmed up before any timed cell so JIT compilation never lands
in a measurement.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, Iterator

from .graph import random_affinity_graph, total_cut_weight
from .kernels import warmup
from .partition import partition_k_with_stats

BENCH_EDGE_PROB = 0.1

CSV_HEADER = "n,k,runtime_ms,bisection_count,cut_weight"


@dataclass(frozen=True)
class BenchRow:
    n: int
    k: int
    runtime_ms: float
    bisection_count: int
    cut_weight: float

    def csv(self) -> str:
        return f"{self.n},{self.k},{self.runtime_ms:.3f},{self.bisection_count},{self.cut_weight!r}"


def cell_seed(base_seed: int, n: int, k: int) -> int:
    return base_seed * 1_000_003 + n * 31 + k


def run_grid(
    n_list: Iterable[int],
    k_list: Iterable[int],
    repeats: int = 1,
    base_seed: int = 0,
    kernel: str | None = None,
    edge_prob: float = BENCH_EDGE_PROB,
) -> Iterator[BenchRow]:
    """Yield one row per (n, k, repeat), n-major order.

    Each (n, k) cell partitions the same seeded graph ``repeats`` times;
    only the timing varies between repeats.
    """
    warmup(kernel)
    for n in sorted(set(n_list)):
        for k in sorted(set(k_list)):
            if k > n:
                continue
            g = random_affinity_graph(n, edge_prob=edge_prob, seed=cell_seed(base_seed, n, k))
            for _ in range(repeats):
                t0 = time.perf_counter()
                part, stats = partition_k_with_stats(g, k, kernel=kernel)
                elapsed_ms = (time.perf_counter() - t0) * 1000.0
                yield BenchRow(
                    n=n,
                    k=k,
                    runtime_ms=elapsed_ms,
                    bisection_count=stats.bisections,
                    cut_weight=total_cut_weight(g, part),
                )


def grid_csv(rows: Iterable[BenchRow]) -> str:
    return "\n".join([CSV_HEADER, *(row.csv() for row in rows)]) + "\n"
