"""Exception hierarchy shared across the pipeline.

Every error class carries a stable ``exit_code`` so the CLI can map each
failure class to a distinct process exit code.
"""

from __future__ import annotations


class SagaError(Exception):
    """Base class for all pipeline errors."""

    exit_code = 1


# ---------------------------------------------------------------------------
# trace parsing

class TraceError(SagaError):
    exit_code = 10


class UnparseableLine(TraceError):
    exit_code = 10

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class SelfMessage(TraceError):
    exit_code = 11

    def __init__(self, line_no: int, service: str):
        super().__init__(f"line {line_no}: sender and receiver are both {service!r}")
        self.line_no = line_no
        self.service = service


class NegativeBytes(TraceError):
    exit_code = 12

    def __init__(self, line_no: int, value: int):
        super().__init__(f"line {line_no}: negative byte count {value}")
        self.line_no = line_no
        self.value = value


# ---------------------------------------------------------------------------
# metadata parsing

class MetadataError(SagaError):
    exit_code = 13


class InvalidMetadata(MetadataError):
    exit_code = 13

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class DuplicateService(MetadataError):
    exit_code = 14

    def __init__(self, service: str):
        super().__init__(f"duplicate service id {service!r}")
        self.service = service


class MissingId(MetadataError):
    exit_code = 15

    def __init__(self, index: int):
        super().__init__(f"metadata entry {index} has no 'id' field")
        self.index = index


# ---------------------------------------------------------------------------
# affinity / graph

class SameService(SagaError):
    exit_code = 16

    def __init__(self, service: str):
        super().__init__(f"affinity of a service with itself is undefined: {service!r}")
        self.service = service


class UnknownVertex(SagaError):
    exit_code = 17

    def __init__(self, service: str):
        super().__init__(f"service {service!r} is not a vertex of this graph")
        self.service = service


class InvalidPartition(SagaError):
    exit_code = 18

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


# ---------------------------------------------------------------------------
# partitioning

class TooFewVertices(SagaError):
    exit_code = 19

    def __init__(self, n: int):
        super().__init__(f"bisection needs at least 2 vertices, got {n}")
        self.n = n


class KNonPositive(SagaError):
    exit_code = 20

    def __init__(self, k: int):
        super().__init__(f"subset count must be positive, got {k}")
        self.k = k


class KTooLarge(SagaError):
    exit_code = 21

    def __init__(self, k: int, n: int):
        super().__init__(f"cannot split {n} vertices into {k} subsets")
        self.k = k
        self.n = n


class GraphTooLarge(SagaError):
    """Exhaustive enumeration guard for the brute-force solver."""

    exit_code = 22

    def __init__(self, n: int, limit: int):
        super().__init__(f"exhaustive search limited to {limit} vertices, got {n}")
        self.n = n
        self.limit = limit


# ---------------------------------------------------------------------------
# placement

class NodeCountMismatch(SagaError):
    exit_code = 23

    def __init__(self, k: int, n_nodes: int):
        super().__init__(f"partition has {k} subsets but {n_nodes} nodes were given")
        self.k = k
        self.n_nodes = n_nodes


class ServiceSetMismatch(SagaError):
    exit_code = 24

    def __init__(self, only_current: set[str], only_target: set[str]):
        detail = []
        if only_current:
            detail.append(f"only in current: {sorted(only_current)}")
        if only_target:
            detail.append(f"only in target: {sorted(only_target)}")
        super().__init__("placements cover different services; " + "; ".join(detail))
        self.only_current = only_current
        self.only_target = only_target


class UnassignedService(SagaError):
    exit_code = 25

    def __init__(self, service: str):
        super().__init__(f"service {service!r} has no node assignment")
        self.service = service


# ---------------------------------------------------------------------------
# configuration / file plumbing

class ConfigError(SagaError):
    exit_code = 26

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class InvalidWindow(SagaError):
    exit_code = 27

    def __init__(self, start: int, end: int):
        super().__init__(f"window end {end} must be after window start {start}")
        self.start = start
        self.end = end


class SchemaError(SagaError):
    """An intermediate JSON file does not match its expected layout."""

    exit_code = 28

    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


EXIT_FILE_NOT_FOUND = 3
