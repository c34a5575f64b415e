"""Light subset spanners from spanner oracles and the converse reduction."""

from spanner_forge.subset.buckets import EdgeBuckets, bucket_edges, locate
from spanner_forge.subset.builder import (
    SubsetSpannerResult,
    build_subset_spanner,
    calibration_queries,
    credit_rate,
)
from spanner_forge.subset.clusters import (
    Cluster,
    break_tree,
    build_cluster_graph,
    cluster_tree,
    effective_diameter,
    terminal_diameter,
)
from spanner_forge.subset.converse import (
    SubsetSpannerOracle,
    close_components,
    oracle_from_subset_spanner,
    separator_subset_spanner,
)
from spanner_forge.subset.hierarchy import (
    ClusterHierarchy,
    LevelReport,
    high_degree_threshold,
    safety_factor,
)
from spanner_forge.subset.ledger import DEFERRED, CreditLedger, LedgerEvent

__all__ = [
    "DEFERRED",
    "Cluster",
    "ClusterHierarchy",
    "CreditLedger",
    "EdgeBuckets",
    "LedgerEvent",
    "LevelReport",
    "SubsetSpannerOracle",
    "SubsetSpannerResult",
    "break_tree",
    "bucket_edges",
    "build_cluster_graph",
    "build_subset_spanner",
    "calibration_queries",
    "close_components",
    "cluster_tree",
    "credit_rate",
    "effective_diameter",
    "high_degree_threshold",
    "locate",
    "oracle_from_subset_spanner",
    "safety_factor",
    "separator_subset_spanner",
    "terminal_diameter",
]
