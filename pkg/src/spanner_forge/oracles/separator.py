"""Graph spanner oracle built on shortest-path separators."""

import logging
import typing as t

from spanner_forge.graph import (
    Vertex,
    WeightedGraph,
    dijkstra,
    reconstruct_path,
    shortest_paths,
)
from spanner_forge.oracles.base import OracleQuery, SpannerOracle
from spanner_forge.separators import (
    EllCloseStats,
    SeparatorProvider,
    default_provider,
    ell_close_spanner,
    split_demands_at_terminals,
)

logger = logging.getLogger(__name__)


def close_pair_paths(
    graph: WeightedGraph, terminals: t.Sequence[Vertex], scale: float
) -> t.List[t.Tuple[Vertex, ...]]:
    """Shortest paths of all terminal pairs at distance at most ``scale``.

    Paths are cut at interior terminals, so every returned path joins two
    terminals and passes no other.
    """
    position = {v: i for i, v in enumerate(terminals)}
    paths = []
    for i, source in enumerate(terminals):
        dist, parent = dijkstra(graph.adjacency.__getitem__, source, cutoff=scale)
        for target in sorted(dist, key=lambda v: (dist[v], v)):
            if position.get(target, -1) > i:
                paths.append(tuple(reconstruct_path(parent, target)))
    return split_demands_at_terminals(paths, terminals)


class SeparatorOracle(SpannerOracle):
    """Spanner oracle for graphs with small shortest-path separators.

    A query turns every terminal pair at distance at most ``l`` into a demand
    path and answers with the close-pair separator spanner.

    Args:
        graph: Host graph.
        provider: Separator provider.
            (default = centroid for trees, shortest-path tree otherwise)
    """

    name = "separator"

    def __init__(
        self, graph: WeightedGraph, provider: t.Optional[SeparatorProvider] = None
    ):
        super().__init__()
        self._graph = graph
        self._provider = provider or default_provider(graph)
        self._stats: t.List[EllCloseStats] = []

    @property
    def last_stats(self) -> t.Optional[EllCloseStats]:
        """Recursion diagnostics of the most recently finished query."""
        with self._lock:
            return self._stats[-1] if self._stats else None

    @property
    def stats_log(self) -> t.Tuple[EllCloseStats, ...]:
        """Recursion diagnostics of every answered query, in finishing order."""
        with self._lock:
            return tuple(self._stats)

    @classmethod
    def from_graph(cls, graph: WeightedGraph) -> "SeparatorOracle":
        """Oracle with the default provider for ``graph``."""
        return cls(graph)

    @property
    def graph(self) -> WeightedGraph:
        """Host graph."""
        return self._graph

    def knows(self, vertex: Vertex) -> bool:
        """Whether ``vertex`` is a host vertex."""
        return vertex in self._graph

    def distance(self, a: Vertex, b: Vertex) -> float:
        """Shortest-path distance in the host graph."""
        return shortest_paths(self._graph, a)[0][b]

    def _answer(self, query: OracleQuery) -> WeightedGraph:
        demands = close_pair_paths(self._graph, query.terminals, query.scale)
        stats = EllCloseStats()
        result = ell_close_spanner(
            self._graph,
            query.terminals,
            demands,
            query.scale,
            query.epsilon,
            separator_provider=self._provider,
            stats=stats,
        )
        with self._lock:
            self._stats.append(stats)
        return result
