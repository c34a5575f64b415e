"""Exact subset TSP on tree decompositions and the Held-Karp baseline."""

from spanner_forge.treewidth.decomposition import (
    NiceNode,
    NiceTreeDecomposition,
    TreeDecomposition,
    dumps_pace_td,
    heuristic_decomposition,
    loads_pace_td,
    make_nice,
    read_pace_td,
    write_pace_td,
)
from spanner_forge.treewidth.dp import (
    Encoding,
    SubsetTspProgram,
    TourResult,
    check_tour,
    is_closed_cover,
    subset_tsp_dp,
    tour_weight,
)
from spanner_forge.treewidth.held_karp import held_karp, held_karp_matrix
from spanner_forge.treewidth.partitions import (
    WeightedPartition,
    canonical_partition,
    consistent_cuts,
    join_partitions,
    reduce_representatives,
    represents,
    set_partitions,
)

__all__ = [
    "Encoding",
    "NiceNode",
    "NiceTreeDecomposition",
    "SubsetTspProgram",
    "TourResult",
    "TreeDecomposition",
    "WeightedPartition",
    "canonical_partition",
    "check_tour",
    "consistent_cuts",
    "dumps_pace_td",
    "held_karp",
    "held_karp_matrix",
    "heuristic_decomposition",
    "is_closed_cover",
    "join_partitions",
    "loads_pace_td",
    "make_nice",
    "read_pace_td",
    "reduce_representatives",
    "represents",
    "set_partitions",
    "subset_tsp_dp",
    "tour_weight",
    "write_pace_td",
]
