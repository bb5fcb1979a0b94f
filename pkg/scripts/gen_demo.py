#!/usr/bin/env python3
"""Regenerate the bundled demo dataset under demo/.

Twelve services in three tightly-coupled groups with a few light
cross-group bridges, plus a deliberately bad round-robin baseline
placement. Fully deterministic.
"""

from __future__ import annotations

import json
from itertools import combinations
from pathlib import Path

import numpy as np

# Group sizes 6/3/3 match the subset-size profile that repeated halving of
# 12 vertices produces for k=3, so a clean clustering is actually reachable.
GROUPS = {
    "identity": ["gateway", "auth", "users", "sessions", "profiles", "notifications"],
    "shop": ["catalog", "search", "cart"],
    "fulfillment": ["orders", "payments", "shipping"],
}

BRIDGES = [
    ("gateway", "catalog"),
    ("gateway", "orders"),
    ("cart", "orders"),
    ("catalog", "shipping"),
]

NODES = ["node-a", "node-b", "node-c"]
WINDOW = (0, 60_000)

PII = {"auth", "users", "sessions", "profiles", "payments"}
STATEFUL = {"users", "sessions", "cart", "orders", "profiles"}


def gen_records(rng: np.random.Generator) -> list[dict]:
    records = []

    def emit(u: str, v: str, n_records: int, bytes_lo: int, bytes_hi: int, count_hi: int):
        for _ in range(n_records):
            sender, receiver = (u, v) if rng.random() < 0.5 else (v, u)
            records.append(
                {
                    "sender": sender,
                    "receiver": receiver,
                    "bytes": int(rng.integers(bytes_lo, bytes_hi)),
                    "count": int(rng.integers(1, count_hi)),
                    "timestamp": int(rng.integers(WINDOW[0], WINDOW[1])),
                }
            )

    for members in GROUPS.values():
        for u, v in combinations(members, 2):
            emit(u, v, n_records=5, bytes_lo=20_000, bytes_hi=60_000, count_hi=12)
    for u, v in BRIDGES:
        emit(u, v, n_records=2, bytes_lo=500, bytes_hi=2_000, count_hi=3)

    records.sort(key=lambda r: r["timestamp"])
    return records


def gen_meta() -> list[dict]:
    entries = []
    for function, members in GROUPS.items():
        for svc in members:
            entry: dict = {"id": svc, "function": function}
            if svc in PII:
                entry["privacy"] = "pii"
            entry["operational"] = "stateful" if svc in STATEFUL else "stateless"
            entries.append(entry)
    entries.sort(key=lambda e: e["id"])
    return entries


def gen_baseline() -> dict:
    services = sorted(s for members in GROUPS.values() for s in members)
    return {
        "nodes": NODES,
        "assignment": {svc: NODES[i % len(NODES)] for i, svc in enumerate(services)},
    }


def main() -> None:
    out = Path(__file__).resolve().parent.parent / "demo"
    out.mkdir(exist_ok=True)
    rng = np.random.default_rng(20240611)

    with open(out / "trace.jsonl", "w", encoding="utf-8") as fh:
        for rec in gen_records(rng):
            fh.write(json.dumps(rec) + "\n")

    (out / "services.json").write_text(
        json.dumps(gen_meta(), indent=2) + "\n", encoding="utf-8"
    )
    (out / "placement_baseline.json").write_text(
        json.dumps(gen_baseline(), indent=2) + "\n", encoding="utf-8"
    )
    (out / "config.json").write_text(
        json.dumps(
            {
                "weights": {
                    "data": 1.0,
                    "privacy": 1.0,
                    "coupling": 1.0,
                    "functional": 1.0,
                    "operational": 1.0,
                },
                "k": 3,
                "window": {"start": WINDOW[0], "end": WINDOW[1]},
                "nodes": NODES,
                "latency_model": {"local_ms": 0.5, "remote_ms": 5.0},
            },
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    print(f"demo dataset written to {out}")


if __name__ == "__main__":
    main()
