"""Shortest-path separator providers.

A provider returns an ordered family of path sets. The paths of every set are
shortest in the graph left after deleting the vertices of the earlier sets,
and deleting all of them splits the graph into small components.
"""

import abc
import logging
import typing as t
from dataclasses import dataclass

import networkx as nx

from spanner_forge.exceptions import ContractViolation, InputError
from spanner_forge.graph import (
    Vertex,
    WeightedGraph,
    is_shortest_path,
    reconstruct_path,
    shortest_paths,
)

logger = logging.getLogger(__name__)

PathSet = t.Tuple[t.Tuple[Vertex, ...], ...]


@dataclass(frozen=True)
class SeparatorFamily:
    """Ordered sets of separator paths.

    Args:
        path_sets: Path sets in removal order.
        size: Vertex count of the separated graph.
        component_sizes: Component sizes after removing every path vertex,
            in decreasing order.
    """

    path_sets: t.Tuple[PathSet, ...]
    size: int
    component_sizes: t.Tuple[int, ...]

    @property
    def vertices(self) -> t.Set[Vertex]:
        """All vertices on separator paths."""
        return {v for paths in self.path_sets for path in paths for v in path}

    @property
    def largest_component(self) -> int:
        """Size of the largest remaining component."""
        return self.component_sizes[0] if self.component_sizes else 0

    @property
    def balance(self) -> float:
        """Largest remaining component relative to the graph size."""
        return self.largest_component / self.size if self.size else 0.0

    @property
    def balanced(self) -> bool:
        """Whether no component exceeds half of the graph."""
        return 2 * self.largest_component <= self.size

    def to_json(self) -> t.Dict[str, t.Any]:
        """Path lists for debugging output."""
        return {
            "n": self.size,
            "path_sets": [[list(path) for path in paths] for paths in self.path_sets],
            "component_sizes": list(self.component_sizes),
            "balance": self.balance,
        }


def _components_after(
    graph: WeightedGraph, removed: t.Set[Vertex]
) -> t.List[int]:
    rest = graph.nx_graph.subgraph(v for v in graph.vertices if v not in removed)
    return sorted((len(c) for c in nx.connected_components(rest)), reverse=True)


def build_family(
    graph: WeightedGraph, path_sets: t.Sequence[t.Sequence[t.Sequence[Vertex]]]
) -> SeparatorFamily:
    """Check the path sets against ``graph`` and measure their balance.

    Raises:
        ContractViolation: If a path is not shortest in its residual graph.
    """
    removed: t.Set[Vertex] = set()
    frozen = []
    for index, paths in enumerate(path_sets):
        residual = graph.without_vertices(removed) if removed else graph
        for path in paths:
            if not is_shortest_path(residual, path):
                raise ContractViolation(
                    f"Separator path {list(path)} of set {index} is not shortest "
                    "in its residual graph"
                )
        frozen.append(tuple(tuple(path) for path in paths))
        removed.update(v for path in paths for v in path)
    family = SeparatorFamily(
        tuple(frozen), len(graph), tuple(_components_after(graph, removed))
    )
    if not family.balanced:
        logger.info(
            "Separator leaves a component of %d of %d vertices",
            family.largest_component,
            family.size,
        )
    return family


class SeparatorProvider(abc.ABC):
    """Computes a shortest-path separator family of a connected graph."""

    name = "abstract"

    @abc.abstractmethod
    def path_sets(
        self, graph: WeightedGraph
    ) -> t.List[t.List[t.Tuple[Vertex, ...]]]:
        """Separator path sets in removal order."""

    def __call__(self, graph: WeightedGraph) -> SeparatorFamily:
        """Separate ``graph``.

        Raises:
            InputError: If the graph is empty or disconnected.
        """
        if not graph.is_connected():
            raise InputError(f"{self.name} separators need a connected graph")
        return build_family(graph, self.path_sets(graph))


class TreeCentroidProvider(SeparatorProvider):
    """A single vertex whose removal leaves components of at most ``n / 2``.

    On trees the centroid always exists. On other graphs the vertex with the
    smallest largest remaining component is returned.
    """

    name = "centroid"

    def path_sets(
        self, graph: WeightedGraph
    ) -> t.List[t.List[t.Tuple[Vertex, ...]]]:
        """One set holding the single-vertex centroid path."""
        if nx.is_tree(graph.nx_graph):
            centroid = _tree_centroid(graph)
        else:
            centroid = min(
                graph.vertices,
                key=lambda v: (_largest(_components_after(graph, {v})), v),
            )
        return [[(centroid,)]]


def _largest(sizes: t.Sequence[int]) -> int:
    return sizes[0] if sizes else 0


def _tree_centroid(tree: WeightedGraph) -> Vertex:
    root = tree.vertices[0]
    order = list(nx.dfs_preorder_nodes(tree.nx_graph, root))
    parent = {root: None}
    for vertex in order:
        for nbr in tree.neighbors(vertex):
            if nbr not in parent:
                parent[nbr] = vertex
    below = {v: 1 for v in order}
    for vertex in reversed(order):
        if parent[vertex] is not None:
            below[parent[vertex]] += below[vertex]
    size = len(order)

    def heaviest(vertex: Vertex) -> int:
        parts = [below[c] for c in tree.neighbors(vertex) if parent[c] == vertex]
        return max(parts + [size - below[vertex]])

    return min(order, key=lambda v: (heaviest(v), v))


class ShortestPathTreeProvider(SeparatorProvider):
    """Fundamental-cycle separators of a shortest-path tree.

    The tree is rooted at the smallest vertex id. Every non-tree edge ``uv``
    yields the candidate made of the two root paths to ``u`` and ``v``; the
    balanced candidate with the fewest vertices wins. Without a balanced
    fundamental cycle single root paths are tried, and if the best candidate
    still leaves a component above ``n / 2`` the provider separates that
    component again, up to ``max_sets`` path sets.

    Args:
        max_sets: Maximum number of path sets. (default = 4)
    """

    name = "spt"

    def __init__(self, max_sets: int = 4):
        if max_sets < 1:
            raise InputError(f"max_sets must be positive, got {max_sets}")
        self._max_sets = max_sets

    def path_sets(
        self, graph: WeightedGraph
    ) -> t.List[t.List[t.Tuple[Vertex, ...]]]:
        """Path sets chosen greedily on the largest remaining component."""
        result: t.List[t.List[t.Tuple[Vertex, ...]]] = []
        removed: t.Set[Vertex] = set()
        target = len(graph) / 2
        part = graph
        while len(result) < self._max_sets:
            paths = _best_root_paths(part, target)
            result.append(paths)
            removed.update(v for path in paths for v in path)
            rest = graph.without_vertices(removed)
            components = rest.connected_components()
            if not components:
                break
            biggest = max(components, key=len)
            if len(biggest) <= target:
                break
            part = rest.subgraph(biggest)
        return result


def _best_root_paths(
    graph: WeightedGraph, target: float
) -> t.List[t.Tuple[Vertex, ...]]:
    root = graph.vertices[0]
    _, parent = shortest_paths(graph, root)
    tree_edges = {frozenset((v, p)) for v, p in parent.items() if p is not None}
    cycles = [
        [tuple(reconstruct_path(parent, u)), tuple(reconstruct_path(parent, v))]
        for u, v, _ in graph.edges()
        if frozenset((u, v)) not in tree_edges
    ]
    singles = [[tuple(reconstruct_path(parent, v))] for v in graph.vertices]

    def score(paths: t.List[t.Tuple[Vertex, ...]]) -> t.Tuple[int, int]:
        cut = {v for path in paths for v in path}
        return _largest(_components_after(graph, cut)), len(cut)

    for candidates in (cycles, singles):
        balanced = [c for c in candidates if score(c)[0] <= target]
        if balanced:
            return min(balanced, key=lambda c: score(c)[1])
    return min(cycles + singles, key=score)


SEPARATOR_PROVIDER_BY_NAME: t.Dict[str, t.Type[SeparatorProvider]] = {
    "centroid": TreeCentroidProvider,
    "spt": ShortestPathTreeProvider,
}


def default_provider(graph: WeightedGraph) -> SeparatorProvider:
    """Centroid provider for trees, shortest-path-tree provider otherwise."""
    if nx.is_tree(graph.nx_graph):
        return TreeCentroidProvider()
    return ShortestPathTreeProvider()
