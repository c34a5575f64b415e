"""Subset TSP pipeline: spanner, contraction, treewidth DP and lifting."""

from spanner_forge.ptas.partitioners import (
    PARTITIONER_CLASS_BY_NAME,
    BfsLayerPartitioner,
    Contraction,
    ContractionPartition,
    GreedyWeightPartitioner,
    Partitioner,
    contract_edges,
)
from spanner_forge.ptas.pipeline import (
    PtasReport,
    PtasResult,
    choose_parts,
    lift_tour,
    lower_bound,
    match_odd_vertices,
    run_ptas,
)

__all__ = [
    "PARTITIONER_CLASS_BY_NAME",
    "BfsLayerPartitioner",
    "Contraction",
    "ContractionPartition",
    "GreedyWeightPartitioner",
    "Partitioner",
    "PtasReport",
    "PtasResult",
    "choose_parts",
    "contract_edges",
    "lift_tour",
    "lower_bound",
    "match_odd_vertices",
    "run_ptas",
]
