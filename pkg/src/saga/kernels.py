"""Swap-scan kernels for the bisection inner loop.

One pass performs floor(m/2) tentative swaps. Each step scans every unlocked
cross pair (a in side 0, b in side 1) for the maximum gain

    g = D[a] + D[b] - 2 * C[a, b]

locks the winning pair, records it, and adjusts the remaining D values as if
the pair had been exchanged. The scan dominates the partitioner's runtime
(O(m^2) per step, O(m^3) per pass), so it is JIT-compiled with numba; a pure
numpy implementation is kept as a fallback and for benchmarking.

Both implementations evaluate the same floating-point expression trees and
break gain ties toward the smallest side-0 index, then the smallest side-1
index, so their outputs are bit-identical. Selection order: explicit ``kind``
argument, then the SAGA_KERNEL environment variable ("numba" or "numpy"),
then numba when importable.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency, but keep the fallback honest
    HAVE_NUMBA = False

ENV_VAR = "SAGA_KERNEL"


def run_pass_numpy(C: np.ndarray, side: np.ndarray, D: np.ndarray, steps: int):
    """Vectorized swap scan. Mutates D; returns (gains, a_picks, b_picks)."""
    m = side.size
    locked = np.zeros(m, dtype=np.bool_)
    gains = np.empty(steps, dtype=np.float64)
    a_picks = np.empty(steps, dtype=np.int64)
    b_picks = np.empty(steps, dtype=np.int64)

    for step in range(steps):
        ai = np.nonzero((side == 0) & ~locked)[0]
        bj = np.nonzero((side == 1) & ~locked)[0]
        gmat = (D[ai][:, None] + D[bj][None, :]) - 2.0 * C[np.ix_(ai, bj)]
        flat = int(np.argmax(gmat))  # first max: smallest a index, then smallest b
        r, c = divmod(flat, bj.size)
        a, b = int(ai[r]), int(bj[c])
        gains[step] = gmat[r, c]
        a_picks[step] = a
        b_picks[step] = b
        locked[a] = True
        locked[b] = True
        ua = (side == 0) & ~locked
        ub = (side == 1) & ~locked
        D[ua] += 2.0 * C[ua, a] - 2.0 * C[ua, b]
        D[ub] += 2.0 * C[ub, b] - 2.0 * C[ub, a]

    return gains, a_picks, b_picks


def _run_pass_py(C, side, D, steps):
    m = side.size
    locked = np.zeros(m, dtype=np.bool_)
    gains = np.empty(steps, dtype=np.float64)
    a_picks = np.empty(steps, dtype=np.int64)
    b_picks = np.empty(steps, dtype=np.int64)

    for step in range(steps):
        best = -np.inf
        best_a = -1
        best_b = -1
        for i in range(m):
            if locked[i] or side[i] != 0:
                continue
            for j in range(m):
                if locked[j] or side[j] != 1:
                    continue
                g = (D[i] + D[j]) - 2.0 * C[i, j]
                if g > best:
                    best = g
                    best_a = i
                    best_b = j
        gains[step] = best
        a_picks[step] = best_a
        b_picks[step] = best_b
        locked[best_a] = True
        locked[best_b] = True
        for x in range(m):
            if locked[x]:
                continue
            if side[x] == 0:
                D[x] += 2.0 * C[x, best_a] - 2.0 * C[x, best_b]
            else:
                D[x] += 2.0 * C[x, best_b] - 2.0 * C[x, best_a]

    return gains, a_picks, b_picks


if HAVE_NUMBA:
    run_pass_numba = njit(cache=True)(_run_pass_py)
else:  # pragma: no cover
    run_pass_numba = None


def default_kernel() -> str:
    env = os.environ.get(ENV_VAR, "").strip().lower()
    if env in ("numba", "numpy"):
        return env
    if env:
        raise ValueError(f"{ENV_VAR} must be 'numba' or 'numpy', got {env!r}")
    return "numba" if HAVE_NUMBA else "numpy"


def resolve_kernel(kind: str | None = None):
    """Return (name, pass function) for the requested or default kernel."""
    name = kind if kind not in (None, "auto") else default_kernel()
    if name == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba kernel requested but numba is not installed")
        return "numba", run_pass_numba
    if name == "numpy":
        return "numpy", run_pass_numpy
    raise ValueError(f"unknown kernel {name!r}")


def warmup(kind: str | None = None) -> None:
    """Trigger JIT compilation outside any timed region."""
    _, fn = resolve_kernel(kind)
    C = np.zeros((2, 2), dtype=np.float64)
    side = np.array([0, 1], dtype=np.int8)
    D = np.zeros(2, dtype=np.float64)
    fn(C, side, D, 1)
