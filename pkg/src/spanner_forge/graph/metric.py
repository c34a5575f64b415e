"""Metric completion over terminals, spanning trees and Steiner trees."""

import logging
import typing as t
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

import numpy as np
from networkx.utils import UnionFind

from spanner_forge.exceptions import InfeasibleError, InputError, InvariantViolation
from spanner_forge.graph.paths import dijkstra, reconstruct_path, within_tolerance
from spanner_forge.graph.weighted_graph import Edge, Vertex, WeightedGraph, ordered

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TerminalMetric:
    """Shortest-path metric on a terminal set plus witness paths.

    Args:
        graph: Source graph the witness paths live in.
        terminals: Ordered terminal ids.
        dist: ``k x k`` distance matrix in terminal order.
        kappa: Witness path for every index pair ``i < j``, running from
            ``terminals[i]`` to ``terminals[j]``.
    """

    graph: WeightedGraph
    terminals: t.Tuple[Vertex, ...]
    dist: np.ndarray
    kappa: t.Dict[t.Tuple[int, int], t.Tuple[Vertex, ...]] = field(repr=False)

    @property
    def k(self) -> int:
        """Number of terminals."""
        return len(self.terminals)

    @cached_property
    def index(self) -> t.Dict[Vertex, int]:
        """Position of every terminal."""
        return {terminal: i for i, terminal in enumerate(self.terminals)}

    def distance(self, a: Vertex, b: Vertex) -> float:
        """Distance between two terminals."""
        index = self.index
        return float(self.dist[index[a], index[b]])

    def path(self, a: Vertex, b: Vertex) -> t.Tuple[Vertex, ...]:
        """Witness shortest path from terminal ``a`` to terminal ``b``."""
        index = self.index
        i, j = index[a], index[b]
        if i == j:
            return (a,)
        if i < j:
            return self.kappa[i, j]
        return tuple(reversed(self.kappa[j, i]))

    def edges(self) -> t.List[Edge]:
        """All completion edges ``(a, b, d)`` sorted by ``(d, min, max)``."""
        result = [
            ordered(self.terminals[i], self.terminals[j]) + (float(self.dist[i, j]),)
            for i, j in combinations(range(self.k), 2)
        ]
        return sorted(result, key=lambda edge: (edge[2], edge[0], edge[1]))

    def as_graph(self) -> WeightedGraph:
        """The complete graph on the terminals weighted by distance."""
        return WeightedGraph(self.edges(), self.terminals)

    def decompress(
        self, pairs: t.Iterable[t.Tuple[Vertex, Vertex]]
    ) -> WeightedGraph:
        """Union of the witness paths of the given terminal pairs.

        The terminals are always part of the result.
        """
        edges: t.Set[t.Tuple[Vertex, Vertex]] = set()
        for a, b in pairs:
            path = self.path(a, b)
            edges.update(ordered(x, y) for x, y in zip(path, path[1:]))
        return self.graph.edge_subgraph(sorted(edges), self.terminals)

    def restrict(self, terminals: t.Sequence[Vertex]) -> "TerminalMetric":
        """Metric on a subset of the terminals (ordered as given)."""
        index = self.index
        positions = [index[terminal] for terminal in terminals]
        kappa = {}
        for a, b in combinations(range(len(positions)), 2):
            kappa[a, b] = self.path(terminals[a], terminals[b])
        return TerminalMetric(
            self.graph,
            tuple(terminals),
            self.dist[np.ix_(positions, positions)],
            kappa,
        )

    def check(self, tolerance: t.Optional[float] = None) -> None:
        """Verify symmetry, the triangle inequality and witness lengths.

        Raises:
            InvariantViolation: Naming the first violated property.
        """
        if not np.allclose(self.dist, self.dist.T) or np.any(np.diag(self.dist) != 0):
            raise InvariantViolation(
                "Terminal metric is not symmetric with zero diagonal"
            )
        for (i, j), path in self.kappa.items():
            if path[0] != self.terminals[i] or path[-1] != self.terminals[j]:
                raise InvariantViolation(
                    f"Witness path of pair {(i, j)} has wrong ends"
                )
            length = self.graph.path_weight(path)
            if not np.isclose(length, self.dist[i, j], rtol=1e-12, atol=0):
                raise InvariantViolation(
                    f"Witness path of pair {(i, j)} has length {length}, "
                    f"expected {self.dist[i, j]}"
                )
        through = np.min(self.dist[:, :, None] + self.dist[None, :, :], axis=1)
        for i, j in zip(*np.nonzero(self.dist > through)):
            if not within_tolerance(self.dist[i, j], through[i, j], tolerance):
                raise InvariantViolation(
                    f"Triangle inequality fails for pair {(int(i), int(j))}"
                )


def _unique_terminals(
    graph: WeightedGraph, terminals: t.Iterable[Vertex]
) -> t.Tuple[Vertex, ...]:
    result = tuple(terminals)
    if len(set(result)) != len(result):
        raise InputError("Terminal list contains duplicates")
    for terminal in result:
        graph.require_vertex(terminal)
    return result


def metric_completion(
    graph: WeightedGraph, terminals: t.Iterable[Vertex]
) -> TerminalMetric:
    """Build the metric completion of a terminal set.

    Args:
        graph: Connected (on the terminals) source graph.
        terminals: Terminal vertices.

    Returns:
        The terminal metric with one witness path per pair.

    Raises:
        InputError: On unknown or duplicate terminals.
        InfeasibleError: If a terminal pair is disconnected.
    """
    ordered_terminals = _unique_terminals(graph, terminals)
    k = len(ordered_terminals)
    dist = np.zeros((k, k))
    kappa: t.Dict[t.Tuple[int, int], t.Tuple[Vertex, ...]] = {}
    for i, source in enumerate(ordered_terminals):
        distance, parent = dijkstra(graph.adjacency.__getitem__, source)
        for j in range(i + 1, k):
            target = ordered_terminals[j]
            if target not in distance:
                raise InfeasibleError(
                    f"Terminals {source!r} and {target!r} are disconnected",
                    pair=(source, target),
                )
            dist[i, j] = dist[j, i] = distance[target]
            kappa[i, j] = tuple(reconstruct_path(parent, target))
    return TerminalMetric(graph, ordered_terminals, dist, kappa)


def kruskal(
    vertices: t.Iterable[Vertex], edges: t.Iterable[Edge]
) -> t.List[Edge]:
    """Minimum spanning forest with ``(weight, min id, max id)`` tie-breaking.

    Returns:
        Forest edges in the order they were accepted.
    """
    forest = UnionFind(vertices)
    chosen = []
    for u, v, weight in sorted(
        (ordered(u, v) + (w,) for u, v, w in edges),
        key=lambda edge: (edge[2], edge[0], edge[1]),
    ):
        if forest[u] != forest[v]:
            forest.union(u, v)
            chosen.append((u, v, weight))
    return chosen


def minimum_spanning_tree(
    source: t.Union[TerminalMetric, WeightedGraph]
) -> t.List[Edge]:
    """Minimum spanning tree of a terminal metric or a graph.

    Args:
        source: Terminal metric (tree over terminals) or connected graph.

    Returns:
        Tree edges ``(u, v, weight)`` with ``u < v``.

    Raises:
        InfeasibleError: If the input is disconnected.
    """
    if isinstance(source, TerminalMetric):
        vertices: t.Sequence[Vertex] = source.terminals
        edges: t.Sequence[Edge] = source.edges()
    else:
        vertices, edges = source.vertices, source.edges()
    tree = kruskal(vertices, edges)
    if len(vertices) > 0 and len(tree) != len(vertices) - 1:
        forest = UnionFind(vertices)
        for u, v, _ in tree:
            forest.union(u, v)
        roots = sorted({forest[v] for v in vertices})
        raise InfeasibleError(
            f"Input with {len(vertices)} vertices is disconnected",
            pair=(roots[0], roots[1]),
        )
    return sorted(tree)


def prune_leaves(graph: WeightedGraph, keep: t.Iterable[Vertex]) -> WeightedGraph:
    """Repeatedly remove degree-one (and isolated) vertices not in ``keep``."""
    keep_set = set(keep)
    nx_graph = graph.to_networkx()
    stack = [v for v in nx_graph.nodes if v not in keep_set and nx_graph.degree(v) <= 1]
    while stack:
        vertex = stack.pop()
        if vertex not in nx_graph or nx_graph.degree(vertex) > 1:
            continue
        neighbors = list(nx_graph.neighbors(vertex))
        nx_graph.remove_node(vertex)
        stack.extend(
            u for u in neighbors if u not in keep_set and nx_graph.degree(u) <= 1
        )
    return WeightedGraph.from_networkx(nx_graph)


def steiner_2approx(
    graph: WeightedGraph,
    terminals: t.Iterable[Vertex],
    metric: t.Optional[TerminalMetric] = None,
) -> WeightedGraph:
    """Steiner tree of weight at most twice the optimum.

    The metric MST is decompressed into the graph, cycles are broken by a
    second MST and non-terminal leaves are pruned.

    Args:
        graph: Source graph.
        terminals: Terminals to span.
        metric: Precomputed metric completion of the terminals.

    Raises:
        InfeasibleError: If the terminals are disconnected.
    """
    if metric is None:
        metric = metric_completion(graph, terminals)
    if metric.k <= 1:
        return graph.edge_subgraph((), metric.terminals)
    union = metric.decompress((a, b) for a, b, _ in minimum_spanning_tree(metric))
    tree = union.edge_subgraph(
        ((u, v) for u, v, _ in minimum_spanning_tree(union)), union.vertices
    )
    result = prune_leaves(tree, metric.terminals)
    logger.debug(
        "Steiner 2-approximation on %d terminals has weight %g",
        metric.k,
        result.total_weight,
    )
    return result


__all__ = [
    "TerminalMetric",
    "kruskal",
    "metric_completion",
    "minimum_spanning_tree",
    "prune_leaves",
    "steiner_2approx",
]
