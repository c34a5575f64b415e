"""Edge partitions of a spanner and edge contraction.

A partitioner splits the edges of a spanner into ``g`` parts; the lightest
non-empty part is contracted. Two partitioners ship:

- ``bfs-layer``: an edge goes to part ``depth mod g`` where ``depth`` is the
  smaller hop distance of its endpoints from the smallest vertex of its
  component.
- ``greedy``: edges are dealt by decreasing weight to the currently lightest
  part.
"""

import abc
import heapq
import logging
import math
import typing as t
from dataclasses import dataclass, field

import networkx as nx
from networkx.utils import UnionFind

from spanner_forge.exceptions import InputError, InvariantViolation
from spanner_forge.graph import Vertex, WeightedGraph, ordered
from spanner_forge.treewidth import heuristic_decomposition

logger = logging.getLogger(__name__)

Pair = t.Tuple[Vertex, Vertex]


@dataclass(frozen=True)
class Contraction:
    """Graph obtained by contracting an edge set.

    Args:
        graph: Contracted graph on the representatives.
        terminals: Terminals of the contracted graph.
        representative: Representative (smallest member) of every vertex.
        origin: Original edge behind every contracted edge.
        redesignations: ``(representative, absorbed terminals)`` for every
            super vertex that changed its terminal set.
    """

    graph: WeightedGraph
    terminals: t.Tuple[Vertex, ...]
    representative: t.Dict[Vertex, Vertex] = field(repr=False)
    origin: t.Dict[Pair, Pair] = field(repr=False)
    redesignations: t.Tuple[t.Tuple[Vertex, t.Tuple[Vertex, ...]], ...] = ()

    def members(self, vertex: Vertex) -> t.Tuple[Vertex, ...]:
        """Original vertices merged into ``vertex``."""
        return tuple(
            sorted(v for v, rep in self.representative.items() if rep == vertex)
        )


def contract_edges(
    graph: WeightedGraph,
    edges: t.Iterable[Pair],
    terminals: t.Iterable[Vertex],
) -> Contraction:
    """Contract ``edges`` of ``graph``.

    Every super vertex is named after its smallest member. A super vertex
    holding a terminal is a terminal; when it absorbs several terminals all
    but one are dropped. Absorptions are logged in increasing order of the
    representative.

    Raises:
        InputError: If an edge or terminal is not in ``graph``.
    """
    terminal_set = set(terminals)
    for terminal in sorted(terminal_set):
        graph.require_vertex(terminal)
    parts = UnionFind(graph.vertices)
    for u, v in sorted(ordered(*edge) for edge in edges):
        if not graph.has_edge(u, v):
            raise InputError(f"Edge ({u}, {v}) does not exist")
        parts.union(u, v)
    representative = {}
    redesignations = []
    for group in sorted((sorted(group) for group in parts.to_sets())):
        rep = group[0]
        for vertex in group:
            representative[vertex] = rep
        absorbed = tuple(v for v in group if v in terminal_set)
        if absorbed and absorbed != (rep,):
            redesignations.append((rep, absorbed))
            logger.info(
                "Super vertex %s absorbs terminals %s and becomes a terminal",
                rep,
                list(absorbed),
            )

    best: t.Dict[Pair, t.Tuple[float, Pair]] = {}
    for u, v, weight in graph.edges():
        a, b = representative[u], representative[v]
        if a == b:
            continue
        key = ordered(a, b)
        if key not in best or (weight, (u, v)) < best[key]:
            best[key] = (weight, (u, v))
    contracted = WeightedGraph(
        ((a, b, weight) for (a, b), (weight, _) in sorted(best.items())),
        sorted(set(representative.values())),
    )
    return Contraction(
        contracted,
        tuple(sorted({representative[v] for v in terminal_set})),
        representative,
        {key: pair for key, (_, pair) in best.items()},
        tuple(redesignations),
    )


@dataclass(frozen=True)
class ContractionPartition:
    """Edge partition of a spanner with the chosen part measured.

    Args:
        g: Number of parts.
        parts: Edge pairs of every part.
        chosen: Index of the lightest non-empty part.
        weights: Weight of every part.
        measured_width: Heuristic treewidth of the spanner with the chosen
            part contracted.
        method: Name of the partitioner.
    """

    g: int
    parts: t.Tuple[t.Tuple[Pair, ...], ...]
    chosen: int
    weights: t.Tuple[float, ...]
    measured_width: int
    method: str

    @property
    def edges(self) -> t.Tuple[Pair, ...]:
        """Edges of the chosen part."""
        return self.parts[self.chosen] if self.parts else ()

    @property
    def weight(self) -> float:
        """Weight of the chosen part."""
        return self.weights[self.chosen] if self.weights else 0.0

    @property
    def non_empty(self) -> int:
        """Number of non-empty parts."""
        return sum(1 for part in self.parts if part)

    def check(self, spanner: WeightedGraph, tolerance: float = 1e-9) -> None:
        """Verify disjointness, coverage and the averaging bound.

        Raises:
            InvariantViolation: If a property fails.
        """
        flat = [edge for part in self.parts for edge in part]
        expected = {ordered(u, v) for u, v, _ in spanner.edges()}
        if len(flat) != len(set(flat)) or set(flat) != expected:
            raise InvariantViolation("Parts are not a partition of the spanner edges")
        if self.non_empty and self.weight > (
            spanner.total_weight / self.non_empty
        ) * (1 + tolerance):
            raise InvariantViolation(
                f"Chosen part weighs {self.weight}, above the average "
                f"{spanner.total_weight / self.non_empty}"
            )

    def as_dict(self) -> t.Dict[str, t.Any]:
        """JSON-friendly summary."""
        return {
            "method": self.method,
            "g": self.g,
            "non_empty": self.non_empty,
            "w_X": self.weight,
            "part_weights": list(self.weights),
            "measured_width": self.measured_width,
        }


class Partitioner(abc.ABC):
    """Base class of all spanner edge partitioners."""

    name = "base"

    @abc.abstractmethod
    def split(self, spanner: WeightedGraph, g: int) -> t.List[t.List[Pair]]:
        """Assign every edge to one of ``g`` parts."""

    def __call__(self, spanner: WeightedGraph, g: int) -> ContractionPartition:
        """Partition ``spanner`` into ``g`` parts and measure the lightest.

        Raises:
            InputError: If ``g < 1``.
        """
        if g < 1:
            raise InputError(f"Need at least one part, got g = {g}")
        parts = [tuple(sorted(part)) for part in self.split(spanner, g)]
        weights = tuple(
            math.fsum(spanner.weight(u, v) for u, v in part) for part in parts
        )
        candidates = [i for i, part in enumerate(parts) if part]
        chosen = min(candidates, key=lambda i: (weights[i], i)) if candidates else 0
        contracted = contract_edges(spanner, parts[chosen], ())
        width = heuristic_decomposition(contracted.graph).width
        result = ContractionPartition(
            g, tuple(parts), chosen, weights, width, self.name
        )
        result.check(spanner)
        logger.debug(
            "%s partition into %d parts: w(X)=%g, contracted width %d",
            self.name,
            g,
            result.weight,
            width,
        )
        return result

    def __repr__(self) -> str:
        return f"<{type(self).__name__}>"


class BfsLayerPartitioner(Partitioner):
    """Parts by BFS depth modulo ``g``."""

    name = "bfs-layer"

    def split(self, spanner: WeightedGraph, g: int) -> t.List[t.List[Pair]]:
        depth: t.Dict[Vertex, int] = {}
        for component in spanner.connected_components():
            depth.update(
                nx.single_source_shortest_path_length(spanner.nx_graph, min(component))
            )
        parts: t.List[t.List[Pair]] = [[] for _ in range(g)]
        for u, v, _ in spanner.edges():
            parts[min(depth[u], depth[v]) % g].append((u, v))
        return parts


class GreedyWeightPartitioner(Partitioner):
    """Heaviest edge first into the lightest part."""

    name = "greedy"

    def split(self, spanner: WeightedGraph, g: int) -> t.List[t.List[Pair]]:
        parts: t.List[t.List[Pair]] = [[] for _ in range(g)]
        loads = [(0.0, i) for i in range(g)]
        for u, v, weight in sorted(
            spanner.edges(), key=lambda edge: (-edge[2], edge[0], edge[1])
        ):
            load, target = heapq.heappop(loads)
            parts[target].append((u, v))
            heapq.heappush(loads, (load + weight, target))
        return parts


PARTITIONER_CLASS_BY_NAME: t.Dict[str, t.Type[Partitioner]] = {
    BfsLayerPartitioner.name: BfsLayerPartitioner,
    GreedyWeightPartitioner.name: GreedyWeightPartitioner,
}
