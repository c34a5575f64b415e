"""Spanner oracles for metric spaces and graphs."""

import typing as t

from spanner_forge.oracles.base import (
    OracleQuery,
    OracleStats,
    SpannerOracle,
    SparsityReport,
    measure_sparsity,
    oracle_query,
    prune_long_edges,
)
from spanner_forge.oracles.doubling import CorrelationOracle, DoublingOracle
from spanner_forge.oracles.euclidean import EuclideanOracle, greedy_spanner
from spanner_forge.oracles.minor import (
    IdentityMinorProvider,
    Minor,
    MinorOracle,
    MinorProvider,
    TreeMinorProvider,
)
from spanner_forge.oracles.points import PointSet, r_net
from spanner_forge.oracles.separator import SeparatorOracle, close_pair_paths

ORACLE_CLASS_BY_NAME: t.Dict[str, t.Type[SpannerOracle]] = {
    "euclidean": EuclideanOracle,
    "doubling": DoublingOracle,
    "correlation": CorrelationOracle,
    "minor": MinorOracle,
    "separator": SeparatorOracle,
}

__all__ = [
    "ORACLE_CLASS_BY_NAME",
    "CorrelationOracle",
    "DoublingOracle",
    "EuclideanOracle",
    "IdentityMinorProvider",
    "Minor",
    "MinorOracle",
    "MinorProvider",
    "OracleQuery",
    "OracleStats",
    "PointSet",
    "SeparatorOracle",
    "SpannerOracle",
    "SparsityReport",
    "TreeMinorProvider",
    "close_pair_paths",
    "greedy_spanner",
    "measure_sparsity",
    "oracle_query",
    "prune_long_edges",
    "r_net",
]
