"""Subset TSP through a light spanner, contraction and the treewidth DP.

The pipeline builds a subset spanner ``S``, splits its edges into ``g``
parts, contracts the lightest part ``X``, solves subset TSP exactly on
``S / X`` and lifts the tour back by adding the edges of ``X`` and fixing
parities with a matching.
"""

import logging
import math
import typing as t
from collections import Counter
from dataclasses import dataclass, field

import networkx as nx

from spanner_forge.config import check_open_interval, settings
from spanner_forge.exceptions import CapacityError
from spanner_forge.graph import (
    Vertex,
    WeightedGraph,
    metric_completion,
    minimum_spanning_tree,
    ordered,
    reconstruct_path,
    shortest_paths,
    steiner_2approx,
)
from spanner_forge.oracles import SeparatorOracle, SpannerOracle
from spanner_forge.ptas.partitioners import (
    BfsLayerPartitioner,
    Contraction,
    ContractionPartition,
    Partitioner,
    contract_edges,
)
from spanner_forge.subset import build_subset_spanner
from spanner_forge.treewidth import (
    check_tour,
    held_karp,
    heuristic_decomposition,
    subset_tsp_dp,
    tour_weight,
)
from spanner_forge.treewidth.dp import MultiEdge

logger = logging.getLogger(__name__)


@dataclass
class PtasReport:
    """Measurements of one pipeline run."""

    spanner_lightness: float
    g: int
    w_X: float
    measured_width: int
    tour_weight: float
    lower_bound: float
    ratio: float
    matching: str
    odd_vertices: int
    lower_bound_kind: str
    opt_estimate: float = 0.0
    spanner_weight: float = 0.0
    partition: t.Dict[str, t.Any] = field(default_factory=dict)
    redesignations: int = 0

    def as_dict(self) -> t.Dict[str, t.Any]:
        """JSON-friendly form."""
        return dict(vars(self))


@dataclass(frozen=True)
class PtasResult:
    """Tour found by the pipeline.

    Args:
        weight: Tour weight.
        edges: Edge multiset as ``(u, v, multiplicity)`` triples.
        report: Run measurements.
        spanner: The subset spanner the tour lives in.
    """

    weight: float
    edges: t.Tuple[MultiEdge, ...]
    report: PtasReport
    spanner: t.Optional[WeightedGraph] = field(default=None, repr=False)

    def as_dict(self) -> t.Dict[str, t.Any]:
        """JSON-friendly form."""
        return {
            "weight": self.weight,
            "edges": [list(edge) for edge in self.edges],
            "report": self.report.as_dict(),
        }


def choose_parts(spanner_weight: float, epsilon: float, opt_estimate: float) -> int:
    """Number of parts ``ceil(w(S) / (eps * OPT))``, at least 1."""
    if opt_estimate <= 0:
        return 1
    return max(1, math.ceil(spanner_weight / (epsilon * opt_estimate)))


def _pair_distances(
    graph: WeightedGraph, vertices: t.Sequence[Vertex]
) -> t.Dict[t.Tuple[Vertex, Vertex], float]:
    distances = {}
    for vertex in vertices:
        dist, _ = shortest_paths(graph, vertex)
        for other in vertices:
            if other > vertex:
                distances[vertex, other] = dist[other]
    return distances


def match_odd_vertices(
    graph: WeightedGraph,
    odd: t.Sequence[Vertex],
    exact_cap: t.Optional[int] = None,
) -> t.Tuple[t.List[t.Tuple[Vertex, Vertex]], str]:
    """Pair up odd-degree vertices by shortest-path distance in ``graph``.

    An exact minimum-weight perfect matching is used for at most
    ``exact_cap`` vertices, a greedy closest-pair matching beyond.

    Returns:
        Matched pairs and ``"exact"``, ``"greedy"`` or ``"none"``.
    """
    exact_cap = settings.resolve("matching_exact_cap", exact_cap)
    odd = sorted(odd)
    if not odd:
        return [], "none"
    distances = _pair_distances(graph, odd)
    if len(odd) <= exact_cap:
        complete = nx.Graph()
        complete.add_weighted_edges_from(
            (a, b, distance) for (a, b), distance in distances.items()
        )
        matching = nx.min_weight_matching(complete)
        return sorted(ordered(a, b) for a, b in matching), "exact"
    logger.info("Greedy matching of %d odd vertices", len(odd))
    free = set(odd)
    pairs = []
    for (a, b), _ in sorted(distances.items(), key=lambda item: (item[1], item[0])):
        if a in free and b in free:
            pairs.append((a, b))
            free -= {a, b}
    return pairs, "greedy"


def lift_tour(
    spanner: WeightedGraph,
    contraction: Contraction,
    contracted_edges: t.Iterable[MultiEdge],
    chosen: t.Iterable[t.Tuple[Vertex, Vertex]],
    terminals: t.Iterable[Vertex],
    exact_cap: t.Optional[int] = None,
) -> t.Tuple[t.Tuple[MultiEdge, ...], str, int]:
    """Undo a contraction on a tour of the contracted graph.

    Contracted edges map back to their original edges. The edges of every
    contracted component the walk touches are added once, then odd-degree
    vertices are paired by shortest paths of ``spanner``.

    Returns:
        Lifted edge multiset, matching kind and number of odd vertices.
    """
    counts: t.Counter[t.Tuple[Vertex, Vertex]] = Counter()
    touched = set(contraction.terminals)
    for a, b, multiplicity in contracted_edges:
        counts[ordered(*contraction.origin[ordered(a, b)])] += multiplicity
        touched.update((a, b))
    for u, v in chosen:
        if contraction.representative[u] in touched:
            counts[ordered(u, v)] += 1

    degree: t.Counter[Vertex] = Counter()
    for (u, v), multiplicity in counts.items():
        degree[u] += multiplicity
        degree[v] += multiplicity
    odd = [v for v, d in degree.items() if d % 2]
    pairs, kind = match_odd_vertices(spanner, odd, exact_cap)
    for a, b in pairs:
        _, parent = shortest_paths(spanner, a)
        path = reconstruct_path(parent, b)
        for x, y in zip(path, path[1:]):
            counts[ordered(x, y)] += 1

    edges = tuple(sorted((u, v, m) for (u, v), m in counts.items()))
    check_tour(edges, terminals)
    return edges, kind, len(odd)


def lower_bound(
    graph: WeightedGraph, terminals: t.Sequence[Vertex], cap: t.Optional[int] = None
) -> t.Tuple[float, str]:
    """Exact optimum via Held-Karp when small enough, else the metric MST weight."""
    cap = settings.resolve("held_karp_cap", cap)
    if len(terminals) <= cap:
        return held_karp(graph, terminals, cap), "held-karp"
    metric = metric_completion(graph, terminals)
    return math.fsum(w for _, _, w in minimum_spanning_tree(metric)), "mst"


def run_ptas(
    graph: WeightedGraph,
    terminals: t.Iterable[Vertex],
    epsilon: float,
    oracle: t.Optional[SpannerOracle] = None,
    partitioner: t.Optional[Partitioner] = None,
    *,
    g: t.Optional[int] = None,
    width_cap: t.Optional[int] = None,
    exact_cap: t.Optional[int] = None,
) -> PtasResult:
    """Approximate subset TSP through a subset spanner.

    Args:
        graph: Host graph.
        terminals: Terminals to visit.
        epsilon: Target accuracy in ``(0, 1)``; also the spanner stretch
            excess.
        oracle: Spanner oracle of the spanner construction.
            (default = :class:`SeparatorOracle` of ``graph``)
        partitioner: Edge partitioner. (default = BFS layers)
        g: Number of parts. (default = ``ceil(w(S) / (eps * OPT_est))``)
        width_cap: Largest contracted width handed to the DP.
            (default = ``settings.dp_width_cap``)
        exact_cap: Largest odd-vertex count matched exactly.
            (default = ``settings.matching_exact_cap``)

    Returns:
        Tour, report and spanner.

    Raises:
        InputError: If ``epsilon`` is out of range or a terminal is unknown.
        InfeasibleError: If the terminals are disconnected.
        CapacityError: If the contracted spanner is too wide for the DP.
    """
    epsilon = check_open_interval(epsilon, 0, 1, "epsilon")
    width_cap = settings.resolve("dp_width_cap", width_cap)
    terminals = tuple(sorted(set(terminals)))
    partitioner = partitioner or BfsLayerPartitioner()

    steiner = steiner_2approx(graph, terminals)
    opt_estimate = 2 * steiner.total_weight
    if len(terminals) <= 1:
        report = PtasReport(0.0, 1, 0.0, -1, 0.0, 0.0, 1.0, "none", 0, "trivial")
        return PtasResult(0.0, (), report, graph.edge_subgraph((), terminals))

    oracle = oracle or SeparatorOracle(graph)
    spanner = build_subset_spanner(
        graph, terminals, oracle, epsilon, rescale=True
    ).spanner
    parts = g or choose_parts(spanner.total_weight, epsilon, opt_estimate)

    if parts == 1:
        partition = ContractionPartition(
            1,
            (tuple((u, v) for u, v, _ in spanner.edges()),),
            0,
            (spanner.total_weight,),
            heuristic_decomposition(spanner).width,
            "none",
        )
        chosen: t.Tuple[t.Tuple[Vertex, Vertex], ...] = ()
        width = partition.measured_width
        w_x = 0.0
    else:
        partition = partitioner(spanner, parts)
        chosen = partition.edges
        width = partition.measured_width
        w_x = partition.weight
    if width > width_cap:
        raise CapacityError(
            f"Contracted spanner has heuristic treewidth {width} above the DP cap "
            f"{width_cap}; use a larger epsilon or another partitioner"
        )

    contraction = contract_edges(spanner, chosen, terminals)
    contracted_tour = subset_tsp_dp(contraction.graph, contraction.terminals)
    edges, matching, odd = lift_tour(
        spanner, contraction, contracted_tour.edges, chosen, terminals, exact_cap
    )
    weight = tour_weight(spanner, edges)
    bound, bound_kind = lower_bound(graph, terminals)
    report = PtasReport(
        spanner_lightness=spanner.total_weight / steiner.total_weight,
        g=parts,
        w_X=w_x,
        measured_width=width,
        tour_weight=weight,
        lower_bound=bound,
        ratio=weight / bound if bound else 1.0,
        matching=matching,
        odd_vertices=odd,
        lower_bound_kind=bound_kind,
        opt_estimate=opt_estimate,
        spanner_weight=spanner.total_weight,
        partition=partition.as_dict(),
        redesignations=len(contraction.redesignations),
    )
    logger.info(
        "PTAS tour %g vs %s bound %g (ratio %.4f, g=%d, width %d)",
        weight,
        bound_kind,
        bound,
        report.ratio,
        parts,
        width,
    )
    return PtasResult(weight, edges, report, spanner)

