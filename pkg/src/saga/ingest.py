"""Trace and metadata ingestion.

Parses message-trace logs (JSONL or CSV) and service metadata, then folds the
records into per-pair traffic aggregates over a time window. All functions are
pure; records and windows are immutable once built.

Trace formats:
  JSONL  one object per line:
         {"sender": "orders", "receiver": "payments", "bytes": 512,
          "count": 2, "timestamp": 1000}
  CSV    fixed header ``sender,receiver,bytes,count,timestamp``

``count`` lets one record stand for several identical messages; ``bytes`` is
the total payload for the record, not per message.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import IO, Iterable, Mapping

from .errors import (
    DuplicateService,
    InvalidMetadata,
    InvalidWindow,
    MissingId,
    NegativeBytes,
    SelfMessage,
    UnparseableLine,
)

ServiceId = str

CSV_HEADER = ["sender", "receiver", "bytes", "count", "timestamp"]


def canonical_pair(u: ServiceId, v: ServiceId) -> tuple[ServiceId, ServiceId]:
    """Unordered service pair in its canonical (sorted) form."""
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class MessageRecord:
    """One observed sender -> receiver exchange."""

    sender: ServiceId
    receiver: ServiceId
    bytes: int
    count: int = 1
    timestamp: int = 0


@dataclass(frozen=True)
class ServiceMeta:
    """Per-service tags. An absent tag never matches anything, including
    another absent tag."""

    id: ServiceId
    privacy_tag: str | None = None
    function_tag: str | None = None
    operational_tag: str | None = None


@dataclass(frozen=True)
class MetricsWindow:
    """Per-pair and global traffic aggregates over [window_start, window_end).

    Pair keys are canonical (sorted) two-service tuples; ``pair_bytes`` and
    ``pair_messages`` always share the same key set.
    """

    window_start: int
    window_end: int
    pair_bytes: dict[tuple[ServiceId, ServiceId], int]
    pair_messages: dict[tuple[ServiceId, ServiceId], int]
    total_bytes: int
    total_messages: int
    services: frozenset[ServiceId]

    @property
    def is_empty(self) -> bool:
        """True when no record fell inside the window."""
        return self.total_messages == 0

    def sorted_pairs(self) -> list[tuple[ServiceId, ServiceId]]:
        return sorted(self.pair_bytes)


@dataclass
class TraceParseResult:
    """Parsed records plus the skipped-line count from lenient mode."""

    records: list[MessageRecord]
    skipped: int = 0

    def __iter__(self):
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)


def _as_text(stream: IO) -> IO[str]:
    first = getattr(stream, "read", None)
    if first is None:
        raise TypeError("parse expects a readable stream")
    if isinstance(stream, io.TextIOBase):
        return stream
    mode = getattr(stream, "mode", "")
    if "b" in mode or isinstance(stream, (io.RawIOBase, io.BufferedIOBase)):
        return io.TextIOWrapper(stream, encoding="utf-8")
    return stream


def _check_record(line_no: int, sender, receiver, nbytes, count, timestamp) -> MessageRecord:
    if not isinstance(sender, str) or not sender:
        raise UnparseableLine(line_no, "sender must be a non-empty string")
    if not isinstance(receiver, str) or not receiver:
        raise UnparseableLine(line_no, "receiver must be a non-empty string")
    if not isinstance(nbytes, int) or isinstance(nbytes, bool):
        raise UnparseableLine(line_no, "bytes must be an integer")
    if not isinstance(count, int) or isinstance(count, bool):
        raise UnparseableLine(line_no, "count must be an integer")
    if not isinstance(timestamp, int) or isinstance(timestamp, bool):
        raise UnparseableLine(line_no, "timestamp must be an integer")
    if sender == receiver:
        raise SelfMessage(line_no, sender)
    if nbytes < 0:
        raise NegativeBytes(line_no, nbytes)
    if count < 1:
        raise UnparseableLine(line_no, f"count must be >= 1, got {count}")
    if timestamp < 0:
        raise UnparseableLine(line_no, f"timestamp must be >= 0, got {timestamp}")
    return MessageRecord(sender, receiver, nbytes, count, timestamp)


def _parse_jsonl_line(line_no: int, line: str) -> MessageRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise UnparseableLine(line_no, f"invalid JSON: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise UnparseableLine(line_no, "expected a JSON object")
    missing = [k for k in ("sender", "receiver", "bytes", "timestamp") if k not in obj]
    if missing:
        raise UnparseableLine(line_no, f"missing fields: {', '.join(missing)}")
    return _check_record(
        line_no,
        obj["sender"],
        obj["receiver"],
        obj["bytes"],
        obj.get("count", 1),
        obj["timestamp"],
    )


def _parse_csv_row(line_no: int, row: list[str]) -> MessageRecord:
    if len(row) != 5:
        raise UnparseableLine(line_no, f"expected 5 columns, got {len(row)}")
    sender, receiver = row[0], row[1]
    ints = []
    for name, cell in zip(("bytes", "count", "timestamp"), row[2:]):
        try:
            ints.append(int(cell))
        except ValueError:
            raise UnparseableLine(line_no, f"{name} must be an integer, got {cell!r}") from None
    return _check_record(line_no, sender, receiver, ints[0], ints[1], ints[2])


def parse_trace(stream: IO, format: str = "jsonl", lenient: bool = False) -> TraceParseResult:
    """Parse a message-trace stream into records, preserving input order.

    Args:
        stream: readable text or byte stream.
        format: "jsonl" or "csv".
        lenient: when True, malformed lines are skipped and counted instead
            of raising.

    Raises:
        UnparseableLine, SelfMessage, NegativeBytes: on the first bad line
            in strict mode.
    """
    if format not in ("jsonl", "csv"):
        raise ValueError(f"unsupported trace format {format!r}")
    text = _as_text(stream)
    records: list[MessageRecord] = []
    skipped = 0

    if format == "jsonl":
        for line_no, line in enumerate(text, start=1):
            if not line.strip():
                continue
            try:
                records.append(_parse_jsonl_line(line_no, line))
            except (UnparseableLine, SelfMessage, NegativeBytes):
                if not lenient:
                    raise
                skipped += 1
    else:
        reader = csv.reader(text)
        header = next(reader, None)
        if header is None or [c.strip() for c in header] != CSV_HEADER:
            raise UnparseableLine(1, f"expected CSV header {','.join(CSV_HEADER)!r}")
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            line_no = reader.line_num
            try:
                records.append(_parse_csv_row(line_no, row))
            except (UnparseableLine, SelfMessage, NegativeBytes):
                if not lenient:
                    raise
                skipped += 1

    return TraceParseResult(records=records, skipped=skipped)


def aggregate(
    records: Iterable[MessageRecord],
    window_start: int,
    window_end: int,
    declared_services: Iterable[ServiceId] = (),
) -> MetricsWindow:
    """Fold records with window_start <= timestamp < window_end into a window.

    Direction is discarded: traffic for (u, v) and (v, u) lands on the same
    canonical pair. Services declared in metadata but absent from the trace
    become isolated vertices downstream.
    """
    if window_end <= window_start:
        raise InvalidWindow(window_start, window_end)

    pair_bytes: dict[tuple[ServiceId, ServiceId], int] = {}
    pair_messages: dict[tuple[ServiceId, ServiceId], int] = {}
    services = set(declared_services)

    for rec in records:
        if not (window_start <= rec.timestamp < window_end):
            continue
        key = canonical_pair(rec.sender, rec.receiver)
        pair_bytes[key] = pair_bytes.get(key, 0) + rec.bytes
        pair_messages[key] = pair_messages.get(key, 0) + rec.count
        services.add(rec.sender)
        services.add(rec.receiver)

    # Deterministic key order regardless of input order.
    ordered = sorted(pair_bytes)
    pair_bytes = {k: pair_bytes[k] for k in ordered}
    pair_messages = {k: pair_messages[k] for k in ordered}

    return MetricsWindow(
        window_start=window_start,
        window_end=window_end,
        pair_bytes=pair_bytes,
        pair_messages=pair_messages,
        total_bytes=sum(pair_bytes.values()),
        total_messages=sum(pair_messages.values()),
        services=frozenset(services),
    )


def parse_meta(stream: IO) -> dict[ServiceId, ServiceMeta]:
    """Parse a JSON metadata document: an array of {id, privacy?, function?,
    operational?} objects. Duplicate ids are rejected."""
    text = _as_text(stream)
    try:
        doc = json.load(text)
    except json.JSONDecodeError as exc:
        raise InvalidMetadata(f"invalid JSON: {exc.msg}") from exc
    if not isinstance(doc, list):
        raise InvalidMetadata("metadata document must be a JSON array")

    out: dict[ServiceId, ServiceMeta] = {}
    for index, entry in enumerate(doc):
        if not isinstance(entry, dict):
            raise InvalidMetadata(f"entry {index} is not an object")
        if "id" not in entry:
            raise MissingId(index)
        sid = entry["id"]
        if not isinstance(sid, str) or not sid:
            raise InvalidMetadata(f"entry {index}: id must be a non-empty string")
        if sid in out:
            raise DuplicateService(sid)
        tags = {}
        for key, attr in (("privacy", "privacy_tag"), ("function", "function_tag"),
                          ("operational", "operational_tag")):
            value = entry.get(key)
            if value is not None and not isinstance(value, str):
                raise InvalidMetadata(f"entry {index}: {key} tag must be a string")
            tags[attr] = value
        out[sid] = ServiceMeta(id=sid, **tags)
    return out


# ---------------------------------------------------------------------------
# window file format (shared by the CLI and the graph stage)

def window_to_dict(win: MetricsWindow, meta: Mapping[ServiceId, ServiceMeta] | None = None) -> dict:
    doc = {
        "window_start": win.window_start,
        "window_end": win.window_end,
        "services": sorted(win.services),
        "pairs": [
            {
                "u": u,
                "v": v,
                "bytes": win.pair_bytes[(u, v)],
                "messages": win.pair_messages[(u, v)],
            }
            for u, v in win.sorted_pairs()
        ],
        "total_bytes": win.total_bytes,
        "total_messages": win.total_messages,
        "empty_window": win.is_empty,
    }
    if meta is not None:
        doc["meta"] = {
            m.id: {
                "privacy": m.privacy_tag,
                "function": m.function_tag,
                "operational": m.operational_tag,
            }
            for m in sorted(meta.values(), key=lambda m: m.id)
        }
    return doc


def window_from_dict(doc: dict) -> tuple[MetricsWindow, dict[ServiceId, ServiceMeta]]:
    pair_bytes = {}
    pair_messages = {}
    for p in doc["pairs"]:
        key = canonical_pair(p["u"], p["v"])
        pair_bytes[key] = p["bytes"]
        pair_messages[key] = p["messages"]
    win = MetricsWindow(
        window_start=doc["window_start"],
        window_end=doc["window_end"],
        pair_bytes=pair_bytes,
        pair_messages=pair_messages,
        total_bytes=doc["total_bytes"],
        total_messages=doc["total_messages"],
        services=frozenset(doc["services"]),
    )
    meta = {
        sid: ServiceMeta(
            id=sid,
            privacy_tag=tags.get("privacy"),
            function_tag=tags.get("function"),
            operational_tag=tags.get("operational"),
        )
        for sid, tags in doc.get("meta", {}).items()
    }
    return win, meta
