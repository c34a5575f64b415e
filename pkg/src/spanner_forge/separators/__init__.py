"""Shortest-path-separator spanners for graphs."""

from spanner_forge.separators.anchored import (
    AnchoredPathSet,
    orient_path,
    ss_spanner,
    walk_breakpoints,
    walk_to_path_spanner,
)
from spanner_forge.separators.ell_close import (
    EllCloseStats,
    ell_close_spanner,
    split_demands_at_terminals,
)
from spanner_forge.separators.path_to_path import (
    ptp_single,
    ptp_spanner,
    ptp_weight_bound,
    split_at_long_edges,
)
from spanner_forge.separators.providers import (
    SEPARATOR_PROVIDER_BY_NAME,
    SeparatorFamily,
    SeparatorProvider,
    ShortestPathTreeProvider,
    TreeCentroidProvider,
    build_family,
    default_provider,
)

__all__ = [
    "AnchoredPathSet",
    "EllCloseStats",
    "SEPARATOR_PROVIDER_BY_NAME",
    "SeparatorFamily",
    "SeparatorProvider",
    "ShortestPathTreeProvider",
    "TreeCentroidProvider",
    "build_family",
    "default_provider",
    "ell_close_spanner",
    "orient_path",
    "ptp_single",
    "ptp_spanner",
    "ptp_weight_bound",
    "split_at_long_edges",
    "split_demands_at_terminals",
    "ss_spanner",
    "walk_breakpoints",
    "walk_to_path_spanner",
]
