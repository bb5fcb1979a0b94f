"""Service-affinity graph engine.

Computes service-affinity graphs from message traces, partitions them into
k balanced clusters with an iterative pairwise-swap heuristic, and plans and
simulates the resulting service re-placement.
"""

from .affinity import (
    AffinityBreakdown,
    AffinityWeights,
    combined_affinity,
    coupling_affinity,
    data_affinity,
    functional_affinity,
    operational_affinity,
    privacy_affinity,
)
from .graph import (
    AffinityGraph,
    EdgeData,
    build_graph,
    from_edge_weights,
    random_affinity_graph,
    total_cut_weight,
    total_internal_weight,
)
from .ingest import (
    MessageRecord,
    MetricsWindow,
    ServiceMeta,
    aggregate,
    parse_meta,
    parse_trace,
)
from .partition import (
    Partition,
    bisection_size_profile,
    kl_bisect,
    oracle_min_kcut,
    partition_k,
    partition_k_with_stats,
)
from .placement import (
    ImprovementReport,
    LatencyModel,
    MigrationPlan,
    Placement,
    SimReport,
    assign_clusters,
    compare,
    plan_migration,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "AffinityBreakdown",
    "AffinityGraph",
    "AffinityWeights",
    "EdgeData",
    "ImprovementReport",
    "LatencyModel",
    "MessageRecord",
    "MetricsWindow",
    "MigrationPlan",
    "Partition",
    "Placement",
    "ServiceMeta",
    "SimReport",
    "aggregate",
    "assign_clusters",
    "bisection_size_profile",
    "build_graph",
    "combined_affinity",
    "compare",
    "coupling_affinity",
    "data_affinity",
    "from_edge_weights",
    "functional_affinity",
    "kl_bisect",
    "operational_affinity",
    "oracle_min_kcut",
    "parse_meta",
    "parse_trace",
    "partition_k",
    "partition_k_with_stats",
    "plan_migration",
    "privacy_affinity",
    "random_affinity_graph",
    "simulate",
    "total_cut_weight",
    "total_internal_weight",
]
