"""Single-source shortest paths with deterministic tie-breaking.

Among equally short paths the one whose predecessor has the smaller vertex
id wins, so every path reconstructed from a parent map is reproducible.
"""

import heapq
import math
import typing as t

import numpy as np

from spanner_forge.config import settings
from spanner_forge.exceptions import InfeasibleError

if t.TYPE_CHECKING:  # pragma: no cover
    from spanner_forge.graph.weighted_graph import WeightedGraph

Vertex = t.Any
NeighborFn = t.Callable[[Vertex], t.Iterable[t.Tuple[Vertex, float]]]


def within_tolerance(
    value: float, bound: float, tolerance: t.Optional[float] = None
) -> bool:
    """Check ``value <= bound`` up to the configured relative tolerance."""
    tolerance = settings.resolve("tolerance", tolerance)
    return value <= bound + tolerance * abs(bound)


def dijkstra(
    neighbors: NeighborFn,
    source: Vertex,
    cutoff: float = math.inf,
    target: t.Optional[Vertex] = None,
) -> t.Tuple[t.Dict[Vertex, float], t.Dict[Vertex, t.Optional[Vertex]]]:
    """Dijkstra's algorithm over an adjacency callback.

    Args:
        neighbors: Function returning ``(neighbor, weight)`` pairs of a vertex.
        source: Start vertex.
        cutoff: Vertices farther away than this are not settled.
        target: Stop as soon as this vertex is settled.

    Returns:
        Distance map and parent map of all settled vertices. The parent of
        the source is None.
    """
    dist: t.Dict[Vertex, float] = {source: 0.0}
    parent: t.Dict[Vertex, t.Optional[Vertex]] = {source: None}
    done: t.Set[Vertex] = set()
    heap = [(0.0, source)]
    while heap:
        d, vertex = heapq.heappop(heap)
        if vertex in done or d > dist[vertex]:
            continue
        done.add(vertex)
        if vertex == target:
            break
        for nbr, weight in neighbors(vertex):
            nd = d + weight
            if nd > cutoff:
                continue
            current = dist.get(nbr, math.inf)
            if nd < current:
                dist[nbr] = nd
                parent[nbr] = vertex
                heapq.heappush(heap, (nd, nbr))
            elif nd == current and nbr not in done and vertex < parent[nbr]:
                parent[nbr] = vertex
    settled = {v: dist[v] for v in done}
    return settled, {v: parent[v] for v in done}


def reconstruct_path(
    parent: t.Mapping[Vertex, t.Optional[Vertex]], target: Vertex
) -> t.List[Vertex]:
    """Walk a parent map back from ``target`` to the root.

    Returns:
        Vertex sequence from the root to ``target``.
    """
    path = [target]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def shortest_paths(
    graph: "WeightedGraph", source: Vertex
) -> t.Tuple[t.Dict[Vertex, float], t.Dict[Vertex, t.Optional[Vertex]]]:
    """Single-source shortest paths in a weighted graph.

    Args:
        graph: The graph.
        source: Start vertex.

    Returns:
        Distance map over all vertices (``math.inf`` when unreachable) and the
        parent map of the reachable ones.

    Raises:
        InputError: If the source is not a vertex of the graph.
    """
    graph.require_vertex(source)
    dist, parent = dijkstra(graph.adjacency.__getitem__, source)
    full = {v: dist.get(v, math.inf) for v in graph.vertices}
    return full, parent


def shortest_path(
    graph: "WeightedGraph", source: Vertex, target: Vertex
) -> t.List[Vertex]:
    """One deterministic shortest path between two vertices.

    Raises:
        InputError: If a vertex is unknown.
        InfeasibleError: If the target is unreachable.
    """
    graph.require_vertex(source)
    graph.require_vertex(target)
    _, parent = dijkstra(graph.adjacency.__getitem__, source, target=target)
    if target not in parent:
        raise InfeasibleError(
            f"No path between {source!r} and {target!r}", pair=(source, target)
        )
    return reconstruct_path(parent, target)


def distance_matrix(
    graph: "WeightedGraph", vertices: t.Sequence[Vertex]
) -> np.ndarray:
    """Pairwise shortest-path distances between the given vertices.

    Unreachable pairs are ``inf``.
    """
    index = {v: i for i, v in enumerate(vertices)}
    matrix = np.full((len(vertices), len(vertices)), np.inf)
    for i, vertex in enumerate(vertices):
        dist, _ = shortest_paths(graph, vertex)
        for other, j in index.items():
            matrix[i, j] = dist[other]
    return matrix


def is_shortest_path(
    graph: "WeightedGraph",
    path: t.Sequence[Vertex],
    tolerance: t.Optional[float] = None,
) -> bool:
    """Check that a vertex sequence is a shortest path of ``graph``.

    Every prefix length must equal the graph distance from the first vertex.
    """
    if not path:
        return False
    if any(v not in graph for v in path):
        return False
    dist, _ = shortest_paths(graph, path[0])
    prefix = 0.0
    for a, b in zip(path, path[1:]):
        if not graph.has_edge(a, b):
            return False
        prefix += graph.weight(a, b)
        if not within_tolerance(prefix, dist[b], tolerance):
            return False
    return True
