"""Single-source spanners from a vertex to a shortest path.

Anchors are placed on the base path while walking away from the closest
vertex ``y0``: a vertex becomes the next anchor when reaching it directly is
shorter, by a factor ``1 + eps``, than reaching the previous anchor and then
following the path. The shortest source-to-anchor paths, together with the
base path, preserve all source-to-path distances within ``1 + eps``.
"""

import logging
import math
import typing as t
from dataclasses import dataclass, field
from itertools import accumulate

from spanner_forge.config import check_open_interval
from spanner_forge.exceptions import ContractViolation, InfeasibleError, InputError
from spanner_forge.graph import (
    Vertex,
    WeightedGraph,
    dijkstra,
    is_shortest_path,
    ordered,
    reconstruct_path,
    within_tolerance,
)

logger = logging.getLogger(__name__)

Path = t.Tuple[Vertex, ...]


@dataclass(frozen=True)
class AnchoredPathSet:
    """Result of :func:`ss_spanner`.

    Args:
        source: Source vertex ``p``.
        base_path: The base path, oriented so its first vertex has the
            smaller id.
        y0: Vertex of the base path closest to the source (leftmost on ties).
        radius: Distance ``R`` from the source to the base path.
        right_anchors: Anchors ``y_1 .. y_I`` right of ``y0``.
        left_anchors: Anchors ``y_-1 .. y_-J`` left of ``y0``.
        paths: Shortest source-to-anchor path per anchor (``y0`` included).
        distances: Graph distance from the source per anchor.
        offsets: Position of every base-path vertex along the path.
    """

    source: Vertex
    base_path: Path
    y0: Vertex
    radius: float
    right_anchors: t.Tuple[Vertex, ...]
    left_anchors: t.Tuple[Vertex, ...]
    paths: t.Dict[Vertex, Path] = field(repr=False)
    distances: t.Dict[Vertex, float] = field(repr=False)
    offsets: t.Dict[Vertex, float] = field(repr=False)

    @property
    def anchors(self) -> t.Tuple[Vertex, ...]:
        """All anchors ordered from ``y_-J`` to ``y_I``."""
        return tuple(reversed(self.left_anchors)) + (self.y0,) + self.right_anchors

    @property
    def right_weight(self) -> float:
        """``w(Q_0) + ... + w(Q_I)``."""
        return sum(self.distances[y] for y in (self.y0,) + self.right_anchors)

    @property
    def left_weight(self) -> float:
        """``w(Q_-J) + ... + w(Q_0)``."""
        return sum(self.distances[y] for y in (self.y0,) + self.left_anchors)

    @property
    def right_span(self) -> float:
        """Path distance from ``y0`` to the last right anchor."""
        last = self.right_anchors[-1] if self.right_anchors else self.y0
        return abs(self.offsets[last] - self.offsets[self.y0])

    @property
    def left_span(self) -> float:
        """Path distance from ``y0`` to the last left anchor."""
        last = self.left_anchors[-1] if self.left_anchors else self.y0
        return abs(self.offsets[self.y0] - self.offsets[last])

    def edges(self) -> t.Set[t.Tuple[Vertex, Vertex]]:
        """Edges of the union of all source-to-anchor paths."""
        result = set()
        for path in self.paths.values():
            result.update(ordered(a, b) for a, b in zip(path, path[1:]))
        return result

    def as_graph(
        self, graph: WeightedGraph, with_base_path: bool = False
    ) -> WeightedGraph:
        """The path set (optionally with the base path) as a subgraph."""
        edges = self.edges()
        if with_base_path:
            edges.update(
                ordered(a, b) for a, b in zip(self.base_path, self.base_path[1:])
            )
        return graph.edge_subgraph(sorted(edges), (self.source,) + self.base_path)

    def bound_violations(
        self, epsilon: float, tolerance: t.Optional[float] = None
    ) -> t.List[str]:
        """Names of the numeric guarantees this set fails.

        Checked are the per-side weight ``8 eps^-2 R``, the per-side anchor
        count ``8 eps^-2`` and the per-side span ``4 eps^-1 R``.
        """
        failures = []
        weight_bound = 8 * self.radius / epsilon**2
        span_bound = 4 * self.radius / epsilon
        for side, weight, count, span in (
            ("right", self.right_weight, len(self.right_anchors), self.right_span),
            ("left", self.left_weight, len(self.left_anchors), self.left_span),
        ):
            if not within_tolerance(weight, weight_bound, tolerance):
                failures.append(f"{side} weight {weight} > {weight_bound}")
            if count > 8 / epsilon**2:
                failures.append(f"{side} anchor count {count} > {8 / epsilon**2}")
            if not within_tolerance(span, span_bound, tolerance):
                failures.append(f"{side} span {span} > {span_bound}")
        return failures


def orient_path(path: t.Sequence[Vertex]) -> Path:
    """Orient a path so that the endpoint with the smaller id comes first."""
    path = tuple(path)
    return path if path[0] <= path[-1] else tuple(reversed(path))


def path_offsets(graph: WeightedGraph, path: t.Sequence[Vertex]) -> t.List[float]:
    """Prefix lengths along a path."""
    steps = [graph.weight(a, b) for a, b in zip(path, path[1:])]
    return [0.0] + list(accumulate(steps))


def _scan(
    order: t.Sequence[int],
    start: int,
    dist: t.Sequence[float],
    offsets: t.Sequence[float],
    epsilon: float,
) -> t.List[int]:
    anchors = []
    previous = start
    for index in order:
        along = abs(offsets[index] - offsets[previous])
        if (1 + epsilon) * dist[index] < dist[previous] + along:
            anchors.append(index)
            previous = index
    return anchors


def ss_spanner(
    graph: WeightedGraph,
    base_path: t.Sequence[Vertex],
    source: Vertex,
    epsilon: float,
    validate: bool = True,
) -> AnchoredPathSet:
    """Single-source spanner from ``source`` to a shortest path.

    Args:
        graph: Host graph.
        base_path: Shortest path of ``graph``.
        source: Source vertex.
        epsilon: Stretch parameter in ``(0, 1)``.
        validate: Verify that ``base_path`` is a shortest path.

    Returns:
        The anchors and source-to-anchor shortest paths.

    Raises:
        InputError: If ``epsilon`` is out of range or a vertex is unknown.
        ContractViolation: If ``base_path`` is not a shortest path.
        InfeasibleError: If the source cannot reach the base path.
    """
    check_open_interval(epsilon, 0, 1, "epsilon")
    if not base_path:
        raise InputError("The base path is empty")
    graph.require_vertex(source)
    path = orient_path(base_path)
    if validate and not is_shortest_path(graph, path):
        raise ContractViolation(f"Base path {list(path)} is not a shortest path")
    dist_map, parent = dijkstra(graph.adjacency.__getitem__, source)
    dist = [dist_map.get(v, math.inf) for v in path]
    radius = min(dist)
    if math.isinf(radius):
        raise InfeasibleError(
            f"Vertex {source!r} cannot reach the base path", pair=(source, path[0])
        )
    start = dist.index(radius)
    offsets = path_offsets(graph, path)
    right = _scan(range(start + 1, len(path)), start, dist, offsets, epsilon)
    left = _scan(range(start - 1, -1, -1), start, dist, offsets, epsilon)
    chosen = [start] + right + left
    return AnchoredPathSet(
        source=source,
        base_path=path,
        y0=path[start],
        radius=radius,
        right_anchors=tuple(path[i] for i in right),
        left_anchors=tuple(path[i] for i in left),
        paths={path[i]: tuple(reconstruct_path(parent, path[i])) for i in chosen},
        distances={path[i]: dist[i] for i in chosen},
        offsets=dict(zip(path, offsets)),
    )


def distance_to_path(
    graph: WeightedGraph, vertex: Vertex, path: t.Sequence[Vertex]
) -> float:
    """Graph distance from a vertex to the nearest vertex of a path."""
    dist, _ = dijkstra(graph.adjacency.__getitem__, vertex)
    return min(dist.get(v, math.inf) for v in path)


def walk_breakpoints(
    graph: WeightedGraph,
    walk: t.Sequence[Vertex],
    base_path: t.Sequence[Vertex],
    epsilon: float,
) -> t.List[int]:
    """Indices of the walk vertices that get their own single-source spanner.

    The first walk vertex is always chosen; afterwards the next breakpoint is
    the first vertex whose walk distance from the previous breakpoint exceeds
    ``eps`` times its distance to the base path.
    """
    offsets = path_offsets(graph, walk)
    breakpoints = [0]
    for index in range(1, len(walk)):
        along = offsets[index] - offsets[breakpoints[-1]]
        if along > epsilon * distance_to_path(graph, walk[index], base_path):
            breakpoints.append(index)
    return breakpoints


def walk_to_path_spanner(
    graph: WeightedGraph,
    walk: t.Sequence[Vertex],
    base_path: t.Sequence[Vertex],
    epsilon: float,
) -> WeightedGraph:
    """Subgraph preserving walk-to-path distances within ``1 + 4 eps``.

    The result holds the walk itself plus a single-source spanner per
    breakpoint; together with the base path it serves every walk vertex.

    Args:
        graph: Host graph.
        walk: Vertex sequence along edges of ``graph`` (repeats allowed).
        base_path: Shortest path of ``graph``.
        epsilon: Stretch parameter in ``(0, 1)``.

    Raises:
        InputError: If the walk is empty or uses a missing edge.
        ContractViolation: If ``base_path`` is not a shortest path.
    """
    if not walk:
        raise InputError("The walk is empty")
    for a, b in zip(walk, walk[1:]):
        if not graph.has_edge(a, b):
            raise InputError(f"Walk step ({a}, {b}) is not an edge")
    check_open_interval(epsilon, 0, 1, "epsilon")
    path = orient_path(base_path)
    if not is_shortest_path(graph, path):
        raise ContractViolation(f"Base path {list(path)} is not a shortest path")
    edges: t.Set[t.Tuple[Vertex, Vertex]] = {
        ordered(a, b) for a, b in zip(walk, walk[1:]) if a != b
    }
    breakpoints = walk_breakpoints(graph, walk, path, epsilon)
    for index in breakpoints:
        anchored = ss_spanner(graph, path, walk[index], epsilon, validate=False)
        edges.update(anchored.edges())
    logger.debug(
        "Walk of %d vertices uses %d breakpoints", len(walk), len(breakpoints)
    )
    return graph.edge_subgraph(sorted(edges), walk)
