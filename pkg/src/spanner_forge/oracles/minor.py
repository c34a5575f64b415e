"""Spanner oracle that decompresses a distance-preserving minor."""

import abc
import logging
import math
import typing as t
from dataclasses import dataclass, field

import networkx as nx

from spanner_forge.config import settings
from spanner_forge.exceptions import (
    ContractViolation,
    InfeasibleError,
    InputError,
)
from spanner_forge.graph import (
    Vertex,
    WeightedGraph,
    dijkstra,
    ordered,
    prune_leaves,
    shortest_paths,
    within_tolerance,
)
from spanner_forge.oracles.base import OracleQuery, SpannerOracle

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Minor:
    """A minor of a host graph together with its decompression map.

    Args:
        graph: The minor; its vertices are host vertices.
        paths: Host path for every minor edge, keyed by the ordered pair and
            running from the smaller to the larger endpoint.
    """

    graph: WeightedGraph
    paths: t.Dict[t.Tuple[Vertex, Vertex], t.Tuple[Vertex, ...]] = field(repr=False)

    def path(self, u: Vertex, v: Vertex) -> t.Tuple[Vertex, ...]:
        """Host path realizing the minor edge ``uv`` from ``u`` to ``v``."""
        path = self.paths[ordered(u, v)]
        return path if path[0] == u else tuple(reversed(path))

    def steiner_vertices(self, terminals: t.Iterable[Vertex]) -> t.List[Vertex]:
        """Minor vertices that are not terminals."""
        keep = set(terminals)
        return [v for v in self.graph.vertices if v not in keep]


class MinorProvider(abc.ABC):
    """Supplies a minor preserving terminal distances within ``1 + eps``."""

    @abc.abstractmethod
    def minor(
        self, graph: WeightedGraph, terminals: t.Sequence[Vertex], epsilon: float
    ) -> Minor:
        """Compute the minor for a terminal set."""


class IdentityMinorProvider(MinorProvider):
    """The host graph is its own (exact) minor."""

    def minor(
        self, graph: WeightedGraph, terminals: t.Sequence[Vertex], epsilon: float
    ) -> Minor:
        """Return the host graph with trivial paths."""
        return Minor(graph, {(u, v): (u, v) for u, v, _ in graph.edges()})


class TreeMinorProvider(MinorProvider):
    """Exact minor of a tree.

    The tree spanned by the terminals is kept, non-terminal leaves are pruned
    and non-terminal vertices of degree two are spliced out, so at most
    ``k - 2`` Steiner vertices remain.
    """

    def minor(
        self, graph: WeightedGraph, terminals: t.Sequence[Vertex], epsilon: float
    ) -> Minor:
        """Compute the spliced Steiner subtree.

        Raises:
            InputError: If the component of the terminals is not a tree.
            InfeasibleError: If the terminals are disconnected.
        """
        terminals = tuple(terminals)
        component = nx.node_connected_component(graph.nx_graph, terminals[0])
        for terminal in terminals[1:]:
            if terminal not in component:
                raise InfeasibleError(
                    f"Terminals {terminals[0]!r} and {terminal!r} are disconnected",
                    pair=(terminals[0], terminal),
                )
        tree = graph.subgraph(component)
        if not nx.is_tree(tree.nx_graph):
            raise InputError("The tree minor provider needs a tree input")
        pruned = prune_leaves(tree, terminals).to_networkx()
        for u, v in pruned.edges:
            pruned.edges[u, v]["path"] = ordered(u, v)
        keep = set(terminals)
        for vertex in sorted(pruned.nodes):
            if vertex in keep or pruned.degree(vertex) != 2:
                continue
            a, b = sorted(pruned.neighbors(vertex))
            left = _oriented(pruned.edges[a, vertex]["path"], a)
            right = _oriented(pruned.edges[vertex, b]["path"], vertex)
            weight = (
                pruned.edges[a, vertex]["weight"] + pruned.edges[vertex, b]["weight"]
            )
            pruned.remove_node(vertex)
            pruned.add_edge(
                a, b, weight=weight, multiplicity=1, path=left + right[1:]
            )
        paths = {}
        for u, v, data in pruned.edges(data=True):
            paths[ordered(u, v)] = _oriented(data["path"], min(u, v))
            del data["path"]
        result = Minor(WeightedGraph.from_networkx(pruned), paths)
        logger.debug(
            "Tree minor keeps %d vertices for %d terminals",
            len(result.graph),
            len(terminals),
        )
        return result


def _oriented(path: t.Sequence[Vertex], start: Vertex) -> t.Tuple[Vertex, ...]:
    return tuple(path) if path[0] == start else tuple(reversed(path))


class MinorOracle(SpannerOracle):
    """Graph oracle answering queries from a distance-preserving minor.

    Minor edges of length at least ``2l`` are dropped and every remaining
    minor edge is replaced by its host path.

    Args:
        graph: Host graph.
        provider: Minor provider. (default = tree provider for trees,
            identity otherwise)
    """

    name = "minor"

    def __init__(
        self, graph: WeightedGraph, provider: t.Optional[MinorProvider] = None
    ):
        super().__init__()
        self._graph = graph
        if provider is None:
            if nx.is_forest(graph.nx_graph):
                provider = TreeMinorProvider()
            else:
                provider = IdentityMinorProvider()
        self._provider = provider

    @classmethod
    def from_graph(cls, graph: WeightedGraph) -> "MinorOracle":
        """Oracle with the default provider for ``graph``."""
        return cls(graph)

    @property
    def graph(self) -> WeightedGraph:
        """Host graph."""
        return self._graph

    @property
    def provider(self) -> MinorProvider:
        """Minor provider."""
        return self._provider

    def knows(self, vertex: Vertex) -> bool:
        """Whether ``vertex`` is a host vertex."""
        return vertex in self._graph

    def distance(self, a: Vertex, b: Vertex) -> float:
        """Shortest-path distance in the host graph."""
        return shortest_paths(self._graph, a)[0][b]

    def _answer(self, query: OracleQuery) -> WeightedGraph:
        minor = self._provider.minor(self._graph, query.terminals, query.epsilon)
        self._check_contract(minor, query)
        used = set()
        for u, v, weight in minor.graph.edges():
            if weight >= 2 * query.scale:
                continue
            path = minor.path(u, v)
            used.update(ordered(a, b) for a, b in zip(path, path[1:]))
        return self._graph.edge_subgraph(sorted(used), query.terminals)

    def _check_contract(self, minor: Minor, query: OracleQuery) -> None:
        tolerance = settings.get("tolerance")
        for u, v, weight in minor.graph.edges():
            if ordered(u, v) not in minor.paths:
                raise ContractViolation(f"Minor edge ({u}, {v}) has no host path")
            path = minor.path(u, v)
            if path[0] != u or path[-1] != v:
                raise ContractViolation(f"Minor edge ({u}, {v}) has a foreign path")
            try:
                length = self._graph.path_weight(path)
            except InputError as error:
                raise ContractViolation(
                    f"Minor edge ({u}, {v}) maps to a non-path: {error}"
                ) from error
            if not math.isclose(length, weight, rel_tol=tolerance):
                raise ContractViolation(
                    f"Minor edge ({u}, {v}) weighs {weight} but its path {length}"
                )
        for i, source in enumerate(query.terminals):
            if source not in minor.graph:
                raise ContractViolation(f"Minor misses terminal {source!r}")
            in_host, _ = dijkstra(self._graph.adjacency.__getitem__, source)
            in_minor, _ = dijkstra(minor.graph.adjacency.__getitem__, source)
            for target in query.terminals[i + 1 :]:
                d_host = in_host.get(target, math.inf)
                d_minor = in_minor.get(target, math.inf)
                if d_minor < d_host * (1 - tolerance):
                    raise ContractViolation(
                        f"Minor shrinks the distance of {(source, target)} "
                        f"from {d_host} to {d_minor}"
                    )
                if not within_tolerance(d_minor, (1 + query.epsilon) * d_host):
                    raise ContractViolation(
                        f"Minor stretches the distance of {(source, target)} "
                        f"from {d_host} to {d_minor}"
                    )
