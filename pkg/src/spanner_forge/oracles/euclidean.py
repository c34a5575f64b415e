"""Euclidean spanner oracle built on the greedy path spanner."""

import logging
import math
import typing as t

from spanner_forge.exceptions import InputError
from spanner_forge.graph import Vertex, WeightedGraph, dijkstra
from spanner_forge.oracles.base import OracleQuery, SpannerOracle
from spanner_forge.oracles.points import PointSet

logger = logging.getLogger(__name__)


def greedy_spanner(
    labels: t.Sequence[Vertex],
    matrix: t.Any,
    stretch: float,
    max_length: float = math.inf,
) -> WeightedGraph:
    """Greedy ``stretch``-spanner over the pairs shorter than ``max_length``.

    Pairs are visited by ``(distance, i, j)``; a pair gets an edge when the
    partial spanner does not already connect it within ``stretch`` times its
    distance.

    Args:
        labels: Point labels in matrix order.
        matrix: Pairwise distances.
        stretch: Target stretch ``t > 1``.
        max_length: Only pairs strictly shorter than this are considered.
    """
    size = len(labels)
    candidates = sorted(
        (float(matrix[i, j]), i, j)
        for i in range(size)
        for j in range(i + 1, size)
        if 0 < matrix[i, j] < max_length
    )
    adjacency: t.Dict[int, t.Dict[int, float]] = {i: {} for i in range(size)}
    for distance, i, j in candidates:
        bound = stretch * distance
        reached, _ = dijkstra(
            lambda v: adjacency[v].items(), i, cutoff=bound, target=j
        )
        if j not in reached:
            adjacency[i][j] = distance
            adjacency[j][i] = distance
    edges = [
        (labels[i], labels[j], weight)
        for i, neighbors in adjacency.items()
        for j, weight in neighbors.items()
        if i < j
    ]
    return WeightedGraph(edges, labels)


class EuclideanOracle(SpannerOracle):
    """Spanner oracle for point sets in Euclidean space.

    The greedy ``(1 + eps)``-spanner of the query terminals is built from the
    pairs closer than ``2l`` only, which yields the same graph as pruning the
    full greedy spanner at ``2l``.

    Args:
        space: Point set in coordinate mode.

    Raises:
        InputError: If the point set has no coordinates.
    """

    name = "euclidean"

    def __init__(self, space: PointSet):
        super().__init__()
        if space.mode != "euclidean":
            raise InputError("The Euclidean oracle needs coordinate points")
        self._space = space

    @classmethod
    def from_graph(cls, graph: WeightedGraph) -> "EuclideanOracle":
        """Unsupported: graphs carry no coordinates."""
        raise InputError("The Euclidean oracle needs a point set, not a graph")

    @property
    def space(self) -> PointSet:
        """Underlying point set."""
        return self._space

    def knows(self, vertex: Vertex) -> bool:
        """Whether the label is a point of the space."""
        return vertex in self._space

    def distance(self, a: Vertex, b: Vertex) -> float:
        """Euclidean distance between two points."""
        return self._space.distance(a, b)

    def _answer(self, query: OracleQuery) -> WeightedGraph:
        matrix = self._space.distances(query.terminals)
        return greedy_spanner(
            query.terminals, matrix, 1 + query.epsilon, max_length=2 * query.scale
        )
