"""Immutable weighted undirected graph and a builder for subgraphs."""

import logging
import math
import typing as t
from functools import cached_property

import networkx as nx

from spanner_forge.exceptions import InputError
from spanner_forge.graph.paths import dijkstra, reconstruct_path

logger = logging.getLogger(__name__)

Vertex = t.Any
Edge = t.Tuple[Vertex, Vertex, float]


def ordered(u: Vertex, v: Vertex) -> t.Tuple[Vertex, Vertex]:
    """Return the pair with the smaller vertex id first."""
    return (u, v) if u <= v else (v, u)


def _check_weight(u: Vertex, v: Vertex, weight: t.Any) -> float:
    try:
        value = float(weight)
    except (TypeError, ValueError) as error:
        raise InputError(
            f"Edge ({u}, {v}) has a non-numeric weight {weight!r}"
        ) from error
    if not math.isfinite(value) or value <= 0:
        raise InputError(f"Edge ({u}, {v}) must have a positive weight, got {weight!r}")
    return value


class WeightedGraph:
    """Undirected graph with strictly positive edge weights.

    The graph is frozen after construction. Parallel edges are collapsed into
    a single edge with a multiplicity when ``allow_parallel`` is set, keeping
    the smallest weight; otherwise a repeated edge is an input error.

    Args:
        edges: Iterable of ``(u, v, weight)`` triples.
        vertices: Additional (possibly isolated) vertices.
        allow_parallel: Accept repeated edges as multiplicity.
            (default = False)

    Raises:
        InputError: On self-loops, non-positive weights or repeated edges in
            simple-graph mode.
    """

    def __init__(
        self,
        edges: t.Iterable[t.Sequence] = (),
        vertices: t.Iterable[Vertex] = (),
        *,
        allow_parallel: bool = False,
    ):
        graph = nx.Graph()
        graph.add_nodes_from(vertices)
        for edge in edges:
            try:
                u, v, weight = edge
            except (TypeError, ValueError) as error:
                raise InputError(f"Malformed edge {edge!r}") from error
            self._insert(graph, u, v, weight, 1, allow_parallel)
        self._nx = nx.freeze(graph)

    @staticmethod
    def _insert(
        graph: nx.Graph,
        u: Vertex,
        v: Vertex,
        weight: t.Any,
        multiplicity: int,
        allow_parallel: bool,
    ) -> None:
        if u == v:
            raise InputError(f"Self-loop at vertex {u} is not allowed")
        value = _check_weight(u, v, weight)
        if graph.has_edge(u, v):
            if not allow_parallel:
                raise InputError(f"Parallel edge ({u}, {v}) in a simple graph")
            data = graph.edges[u, v]
            data["weight"] = min(data["weight"], value)
            data["multiplicity"] += multiplicity
            return
        graph.add_edge(u, v, weight=value, multiplicity=multiplicity)

    @classmethod
    def _wrap(cls, graph: nx.Graph) -> "WeightedGraph":
        instance = cls.__new__(cls)
        instance._nx = nx.freeze(graph)
        return instance

    @classmethod
    def from_networkx(
        cls, graph: nx.Graph, weight: str = "weight", default: float = 1.0
    ) -> "WeightedGraph":
        """Create a graph from a networkx graph.

        Args:
            graph: Undirected networkx graph (multigraphs are collapsed).
            weight: Edge attribute holding the weight.
            default: Weight of edges without the attribute.

        Returns:
            The frozen weighted graph.
        """
        if graph.is_directed():
            raise InputError("Directed graphs are not supported")
        target = nx.Graph()
        target.add_nodes_from(graph.nodes)
        for u, v, data in graph.edges(data=True):
            cls._insert(
                target,
                u,
                v,
                data.get(weight, default),
                data.get("multiplicity", 1),
                graph.is_multigraph(),
            )
        return cls._wrap(target)

    def to_networkx(self) -> nx.Graph:
        """Mutable networkx copy with ``weight`` and ``multiplicity`` attributes."""
        return nx.Graph(self._nx)

    @property
    def nx_graph(self) -> nx.Graph:
        """Frozen networkx view of the graph."""
        return self._nx

    @cached_property
    def vertices(self) -> t.Tuple[Vertex, ...]:
        """All vertices sorted by id."""
        return tuple(sorted(self._nx.nodes))

    @cached_property
    def adjacency(self) -> t.Dict[Vertex, t.Tuple[t.Tuple[Vertex, float], ...]]:
        """Neighbors with weights per vertex, sorted by neighbor id."""
        return {
            v: tuple(
                sorted((u, data["weight"]) for u, data in self._nx.adj[v].items())
            )
            for v in self.vertices
        }

    def edges(self) -> t.Tuple[Edge, ...]:
        """All edges as ``(u, v, weight)`` with ``u < v``, sorted."""
        return self._edges

    @cached_property
    def _edges(self) -> t.Tuple[Edge, ...]:
        return tuple(
            sorted(
                ordered(u, v) + (data["weight"],)
                for u, v, data in self._nx.edges(data=True)
            )
        )

    @cached_property
    def total_weight(self) -> float:
        """Sum of edge weights counted with multiplicity."""
        return float(
            sum(
                data["weight"] * data["multiplicity"]
                for _, _, data in self._nx.edges(data=True)
            )
        )

    def number_of_edges(self) -> int:
        """Number of distinct edges (parallel copies collapsed)."""
        return self._nx.number_of_edges()

    def __len__(self) -> int:
        return self._nx.number_of_nodes()

    def __iter__(self) -> t.Iterator[Vertex]:
        return iter(self.vertices)

    def __contains__(self, vertex: Vertex) -> bool:
        return vertex in self._nx

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (
            set(self.vertices) == set(other.vertices)
            and self.edges() == other.edges()
            and all(
                self.multiplicity(u, v) == other.multiplicity(u, v)
                for u, v, _ in self.edges()
            )
        )

    def __hash__(self) -> int:
        return hash((self.vertices, self.edges()))

    def __repr__(self) -> str:
        return (
            f"WeightedGraph(vertices={len(self)}, edges={self.number_of_edges()}, "
            f"weight={self.total_weight:g})"
        )

    def require_vertex(self, vertex: Vertex) -> None:
        """Raise an input error if the vertex is unknown."""
        if vertex not in self._nx:
            raise InputError(f"Unknown vertex {vertex!r}")

    def neighbors(self, vertex: Vertex) -> t.Tuple[Vertex, ...]:
        """Neighbors of a vertex sorted by id."""
        self.require_vertex(vertex)
        return tuple(u for u, _ in self.adjacency[vertex])

    def degree(self, vertex: Vertex) -> int:
        """Number of distinct neighbors."""
        self.require_vertex(vertex)
        return len(self.adjacency[vertex])

    def has_edge(self, u: Vertex, v: Vertex) -> bool:
        """Whether the edge ``uv`` exists."""
        return self._nx.has_edge(u, v)

    def weight(self, u: Vertex, v: Vertex) -> float:
        """Weight of the edge ``uv``.

        Raises:
            InputError: If the edge does not exist.
        """
        if not self._nx.has_edge(u, v):
            raise InputError(f"Edge ({u}, {v}) does not exist")
        return self._nx.edges[u, v]["weight"]

    def multiplicity(self, u: Vertex, v: Vertex) -> int:
        """Number of parallel copies of ``uv`` (0 if absent)."""
        if not self._nx.has_edge(u, v):
            return 0
        return self._nx.edges[u, v]["multiplicity"]

    def path_weight(self, path: t.Sequence[Vertex]) -> float:
        """Total weight of a vertex sequence walked along existing edges."""
        return float(sum(self.weight(a, b) for a, b in zip(path, path[1:])))

    def subgraph(self, vertices: t.Iterable[Vertex]) -> "WeightedGraph":
        """Induced subgraph on the given vertices."""
        keep = set(vertices)
        for vertex in keep:
            self.require_vertex(vertex)
        return self._wrap(nx.Graph(self._nx.subgraph(keep)))

    def without_vertices(self, vertices: t.Iterable[Vertex]) -> "WeightedGraph":
        """Induced subgraph on all vertices except the given ones."""
        drop = set(vertices)
        return self.subgraph(v for v in self.vertices if v not in drop)

    def edge_subgraph(
        self,
        pairs: t.Iterable[t.Tuple[Vertex, Vertex]],
        vertices: t.Iterable[Vertex] = (),
    ) -> "WeightedGraph":
        """Subgraph made of the given edges and their endpoints.

        Args:
            pairs: Edges as vertex pairs; each must exist in this graph.
            vertices: Extra vertices to keep even if isolated.

        Raises:
            InputError: If a pair is not an edge of this graph.
        """
        graph = nx.Graph()
        for vertex in vertices:
            self.require_vertex(vertex)
            graph.add_node(vertex)
        for u, v in pairs:
            if not self._nx.has_edge(u, v):
                raise InputError(f"Edge ({u}, {v}) does not exist")
            graph.add_edge(u, v, **self._nx.edges[u, v])
        return self._wrap(graph)

    def edges_at_most(self, limit: float) -> "WeightedGraph":
        """Spanning subgraph keeping only edges of weight at most ``limit``."""
        return self.edge_subgraph(
            ((u, v) for u, v, w in self.edges() if w <= limit), self.vertices
        )

    def with_vertices(self, vertices: t.Iterable[Vertex]) -> "WeightedGraph":
        """Copy of the graph with additional isolated vertices."""
        graph = nx.Graph(self._nx)
        graph.add_nodes_from(vertices)
        return self._wrap(graph)

    def is_subgraph_of(self, other: "WeightedGraph") -> bool:
        """Whether every vertex and edge (with identical weight) is in ``other``."""
        if any(v not in other for v in self.vertices):
            return False
        for u, v, weight in self.edges():
            if not other.has_edge(u, v) or other.weight(u, v) != weight:
                return False
            if self.multiplicity(u, v) > max(other.multiplicity(u, v), 1):
                return False
        return True

    def union(self, *others: "WeightedGraph") -> "WeightedGraph":
        """Union of vertex and edge sets.

        Raises:
            InputError: If the same edge carries different weights.
        """
        graph = nx.Graph(self._nx)
        for other in others:
            graph.add_nodes_from(other.nx_graph.nodes)
            for u, v, data in other.nx_graph.edges(data=True):
                if graph.has_edge(u, v):
                    current = graph.edges[u, v]
                    if current["weight"] != data["weight"]:
                        raise InputError(
                            f"Edge ({u}, {v}) has conflicting weights "
                            f"{current['weight']} and {data['weight']}"
                        )
                    current["multiplicity"] = max(
                        current["multiplicity"], data["multiplicity"]
                    )
                else:
                    graph.add_edge(u, v, **data)
        return self._wrap(graph)

    def connected_components(self) -> t.List[t.Tuple[Vertex, ...]]:
        """Connected components as sorted vertex tuples, ordered by first vertex."""
        return sorted(
            (
                tuple(sorted(component))
                for component in nx.connected_components(self._nx)
            ),
            key=lambda component: component[0],
        )

    def is_connected(self) -> bool:
        """Whether the graph is non-empty and connected."""
        return len(self) > 0 and nx.is_connected(self._nx)


class GraphBuilder:
    """Mutable accumulator of a subgraph of a host graph.

    Edges are always taken with the host weight. The builder keeps its own
    adjacency so distances in the partial subgraph can be queried while it
    grows.

    Args:
        host: Graph the built subgraph lives in.
        vertices: Initial (isolated) vertices.
    """

    def __init__(self, host: WeightedGraph, vertices: t.Iterable[Vertex] = ()):
        self._host = host
        self._adjacency: t.Dict[Vertex, t.Dict[Vertex, float]] = {}
        self._weight = 0.0
        for vertex in vertices:
            self.add_vertex(vertex)

    @property
    def host(self) -> WeightedGraph:
        """Graph the builder takes its edges from."""
        return self._host

    @property
    def weight(self) -> float:
        """Current total weight."""
        return self._weight

    def number_of_edges(self) -> int:
        """Current number of edges."""
        return sum(len(nbrs) for nbrs in self._adjacency.values()) // 2

    def __contains__(self, vertex: Vertex) -> bool:
        return vertex in self._adjacency

    def add_vertex(self, vertex: Vertex) -> None:
        """Add an isolated vertex (no-op if present)."""
        self._host.require_vertex(vertex)
        self._adjacency.setdefault(vertex, {})

    def has_edge(self, u: Vertex, v: Vertex) -> bool:
        """Whether ``uv`` was added."""
        return v in self._adjacency.get(u, {})

    def add_edge(self, u: Vertex, v: Vertex) -> float:
        """Add the host edge ``uv``.

        Returns:
            Weight newly added (0 if the edge was already present).
        """
        if self.has_edge(u, v):
            return 0.0
        weight = self._host.weight(u, v)
        self._adjacency.setdefault(u, {})[v] = weight
        self._adjacency.setdefault(v, {})[u] = weight
        self._weight += weight
        return weight

    def add_path(self, path: t.Sequence[Vertex]) -> float:
        """Add every edge of a vertex sequence.

        Returns:
            Weight newly added.
        """
        if len(path) == 1:
            self.add_vertex(path[0])
        return float(sum(self.add_edge(a, b) for a, b in zip(path, path[1:])))

    def add_graph(self, graph: WeightedGraph) -> float:
        """Add all vertices and edges of a subgraph of the host.

        Returns:
            Weight newly added.
        """
        for vertex in graph.vertices:
            self.add_vertex(vertex)
        return float(sum(self.add_edge(u, v) for u, v, _ in graph.edges()))

    def _neighbors(self, vertex: Vertex) -> t.Iterable[t.Tuple[Vertex, float]]:
        return self._adjacency.get(vertex, {}).items()

    def distance(self, u: Vertex, v: Vertex, bound: float = math.inf) -> float:
        """Distance between two vertices in the current subgraph.

        Args:
            u: Source vertex.
            v: Target vertex.
            bound: Search radius; larger distances are reported as infinite.

        Returns:
            The distance or ``math.inf``.
        """
        if u == v:
            return 0.0
        if u not in self._adjacency or v not in self._adjacency:
            return math.inf
        dist, _ = dijkstra(self._neighbors, u, cutoff=bound, target=v)
        return dist.get(v, math.inf)

    def path(
        self, u: Vertex, v: Vertex, bound: float = math.inf
    ) -> t.Optional[t.List[Vertex]]:
        """Shortest ``u``-``v`` path in the current subgraph within ``bound``.

        Returns:
            The vertex sequence, or None if there is none within the bound.
        """
        if u not in self._adjacency or v not in self._adjacency:
            return None
        _, parent = dijkstra(self._neighbors, u, cutoff=bound, target=v)
        return reconstruct_path(parent, v) if v in parent else None

    def copy(self) -> "GraphBuilder":
        """Independent builder with the same content."""
        clone = GraphBuilder(self._host)
        clone._adjacency = {u: dict(nbrs) for u, nbrs in self._adjacency.items()}
        clone._weight = self._weight
        return clone

    def build(self) -> WeightedGraph:
        """Freeze the current state into a :class:`WeightedGraph`."""
        graph = nx.Graph()
        graph.add_nodes_from(self._adjacency)
        for u, neighbors in self._adjacency.items():
            for v in neighbors:
                if u < v:
                    graph.add_edge(
                        u,
                        v,
                        weight=self._host.weight(u, v),
                        multiplicity=1,
                    )
        return WeightedGraph._wrap(graph)
