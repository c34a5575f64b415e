"""Spanner oracles built from subset-spanner algorithms."""

import logging
import typing as t

from networkx.utils import UnionFind

from spanner_forge.graph import (
    Vertex,
    WeightedGraph,
    metric_completion,
    minimum_spanning_tree,
    shortest_paths,
    steiner_2approx,
)
from spanner_forge.oracles import OracleQuery, SeparatorOracle, SpannerOracle
from spanner_forge.subset.builder import build_subset_spanner

logger = logging.getLogger(__name__)

SpannerAlgorithm = t.Callable[[WeightedGraph, t.Sequence[Vertex], float], WeightedGraph]


def close_components(
    graph: WeightedGraph, terminals: t.Sequence[Vertex], scale: float
) -> t.List[t.Tuple[Vertex, ...]]:
    """Terminal groups left by cutting spanning-tree edges longer than ``scale``.

    Terminals in different groups are more than ``scale`` apart.
    """
    metric = metric_completion(graph, terminals)
    parts = UnionFind(metric.terminals)
    for a, b, weight in minimum_spanning_tree(metric):
        if weight <= scale:
            parts.union(a, b)
    return sorted(tuple(sorted(group)) for group in parts.to_sets())


def oracle_from_subset_spanner(
    spanner_algorithm: SpannerAlgorithm,
    graph: WeightedGraph,
    query: OracleQuery,
) -> WeightedGraph:
    """Answer an oracle query with a subset-spanner algorithm.

    The algorithm runs once per terminal group of :func:`close_components`;
    groups of a single terminal are skipped.

    Args:
        spanner_algorithm: Called as ``(graph, terminals, epsilon)``; must
            return a subset ``(1 + eps)``-spanner of the terminals.
        graph: Host graph.
        query: Oracle query.

    Returns:
        Union of the group spanners on (at least) the query terminals.
    """
    outputs = []
    for group in close_components(graph, query.terminals, query.scale):
        if len(group) < 2:
            continue
        outputs.append(spanner_algorithm(graph, group, query.epsilon))
    logger.debug(
        "Answered |T|=%d l=%g with %d delegated calls",
        len(query.terminals),
        query.scale,
        len(outputs),
    )
    return WeightedGraph(vertices=query.terminals).union(*outputs)


def separator_subset_spanner(
    graph: WeightedGraph, terminals: t.Sequence[Vertex], epsilon: float
) -> WeightedGraph:
    """Subset ``(1 + eps)``-spanner driven by the separator oracle."""
    oracle = SeparatorOracle(graph)
    return build_subset_spanner(
        graph, terminals, oracle, epsilon, rescale=True, calibration=0
    ).spanner


class SubsetSpannerOracle(SpannerOracle):
    """Spanner oracle backed by a subset-spanner algorithm.

    The lightness of every delegated call, measured against a 2-approximate
    Steiner tree of its terminals, is kept in :attr:`lightness`.

    Args:
        graph: Host graph.
        spanner_algorithm: Subset-spanner algorithm.
            (default = :func:`separator_subset_spanner`)
    """

    name = "subset"

    def __init__(
        self,
        graph: WeightedGraph,
        spanner_algorithm: t.Optional[SpannerAlgorithm] = None,
    ):
        super().__init__()
        self._graph = graph
        self._algorithm = spanner_algorithm or separator_subset_spanner
        self.lightness: t.List[float] = []

    @classmethod
    def from_graph(cls, graph: WeightedGraph) -> "SubsetSpannerOracle":
        """Oracle with the default algorithm for ``graph``."""
        return cls(graph)

    def knows(self, vertex: Vertex) -> bool:
        """Whether ``vertex`` is a host vertex."""
        return vertex in self._graph

    def distance(self, a: Vertex, b: Vertex) -> float:
        """Shortest-path distance in the host graph."""
        return shortest_paths(self._graph, a)[0][b]

    def _delegate(
        self, graph: WeightedGraph, terminals: t.Sequence[Vertex], epsilon: float
    ) -> WeightedGraph:
        output = self._algorithm(graph, terminals, epsilon)
        baseline = steiner_2approx(graph, terminals).total_weight
        if baseline > 0:
            with self._lock:
                self.lightness.append(output.total_weight / baseline)
        return output

    def _answer(self, query: OracleQuery) -> WeightedGraph:
        return oracle_from_subset_spanner(self._delegate, self._graph, query)
