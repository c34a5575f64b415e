"""Weighted graph substrate and verification oracles."""

from spanner_forge.graph.io import (
    GraphInstance,
    graph_from_dict,
    graph_to_dict,
    loads_graph,
    read_edge_list,
    read_graph,
    to_dot,
    write_graph,
)
from spanner_forge.graph.metric import (
    TerminalMetric,
    kruskal,
    metric_completion,
    minimum_spanning_tree,
    prune_leaves,
    steiner_2approx,
)
from spanner_forge.graph.paths import (
    dijkstra,
    distance_matrix,
    is_shortest_path,
    reconstruct_path,
    shortest_path,
    shortest_paths,
    within_tolerance,
)
from spanner_forge.graph.verification import (
    PairStretch,
    StretchReport,
    measure_lightness,
    pairwise_stretch,
    verify_stretch,
)
from spanner_forge.graph.weighted_graph import (
    Edge,
    GraphBuilder,
    Vertex,
    WeightedGraph,
    ordered,
)

__all__ = [
    "Edge",
    "GraphBuilder",
    "GraphInstance",
    "PairStretch",
    "StretchReport",
    "TerminalMetric",
    "Vertex",
    "WeightedGraph",
    "dijkstra",
    "distance_matrix",
    "graph_from_dict",
    "graph_to_dict",
    "is_shortest_path",
    "kruskal",
    "loads_graph",
    "measure_lightness",
    "metric_completion",
    "minimum_spanning_tree",
    "ordered",
    "pairwise_stretch",
    "prune_leaves",
    "read_edge_list",
    "read_graph",
    "reconstruct_path",
    "shortest_path",
    "shortest_paths",
    "steiner_2approx",
    "to_dot",
    "verify_stretch",
    "within_tolerance",
    "write_graph",
]
