"""Clusters, cluster trees and cluster graphs of the level construction."""

import logging
import math
import typing as t
from collections import defaultdict
from dataclasses import dataclass, field

import networkx as nx
from networkx.utils import UnionFind

from spanner_forge.config import settings
from spanner_forge.exceptions import InvariantViolation
from spanner_forge.graph import (
    Edge,
    GraphBuilder,
    Vertex,
    WeightedGraph,
    dijkstra,
    ordered,
    within_tolerance,
)

logger = logging.getLogger(__name__)

Pair = t.Tuple[Vertex, Vertex]


@dataclass(frozen=True)
class Cluster:
    """Terminals held together by spanner edges.

    Args:
        cid: Identifier, unique within the level.
        level: Level of the cluster (-1 for base clusters).
        phase: Phase that formed the cluster (0 for base clusters).
        terminals: Member terminals.
        children: Identifiers of the member clusters one level below.
        edges: Host edges of the member subgraph as ordered pairs.
        diameter: Largest distance between two member terminals inside the
            member subgraph.
    """

    cid: int
    level: int
    phase: int
    terminals: t.FrozenSet[Vertex]
    children: t.Tuple[int, ...] = ()
    edges: t.FrozenSet[Pair] = field(default=frozenset(), repr=False)
    diameter: float = 0.0

    @property
    def account(self) -> t.Tuple[t.Any, ...]:
        """Ledger account of the cluster."""
        return ("cluster", self.level, self.cid)

    @property
    def representative(self) -> Vertex:
        """Member terminal with the smallest id."""
        return min(self.terminals)

    def subgraph(self, host: WeightedGraph) -> WeightedGraph:
        """Member subgraph as a subgraph of ``host``."""
        return host.edge_subgraph(sorted(self.edges), sorted(self.terminals))

    def as_dict(self) -> t.Dict[str, t.Any]:
        """JSON-friendly summary."""
        return {
            "cid": self.cid,
            "level": self.level,
            "phase": self.phase,
            "terminals": sorted(self.terminals),
            "children": list(self.children),
            "diameter": self.diameter,
        }


def path_pairs(path: t.Sequence[Vertex]) -> t.Set[Pair]:
    """Edges of a vertex sequence as ordered pairs."""
    return {ordered(u, v) for u, v in zip(path, path[1:])}


def mst_account(a: Vertex, b: Vertex) -> t.Tuple[t.Any, ...]:
    """Ledger account of the spanning-tree edge ``ab``."""
    return ("mst",) + ordered(a, b)


def terminal_diameter(
    host: WeightedGraph, edges: t.Iterable[Pair], terminals: t.Iterable[Vertex]
) -> float:
    """Largest distance between two terminals inside an edge set.

    Args:
        host: Graph supplying the edge weights.
        edges: Edges of the subgraph.
        terminals: Terminals to measure.

    Raises:
        InvariantViolation: If two terminals are disconnected in the subgraph.
    """
    adjacency: t.Dict[Vertex, t.Dict[Vertex, float]] = defaultdict(dict)
    for u, v in edges:
        weight = host.weight(u, v)
        adjacency[u][v] = weight
        adjacency[v][u] = weight
    members = sorted(terminals)
    diameter = 0.0
    for position, source in enumerate(members[:-1]):
        dist, _ = dijkstra(lambda x: adjacency.get(x, {}).items(), source)
        for target in members[position + 1 :]:
            if target not in dist:
                raise InvariantViolation(
                    f"Cluster terminals {source!r} and {target!r} are disconnected "
                    "in the member subgraph"
                )
            diameter = max(diameter, dist[target])
    return diameter


def cluster_tree(
    clusters: t.Iterable[int],
    owner: t.Mapping[Vertex, int],
    mst_edges: t.Iterable[Edge],
) -> nx.Graph:
    """Forest over clusters joined by spanning-tree edges.

    Spanning-tree edges between different clusters are scanned in
    ``(weight, u, v)`` order and kept when they join two parts of the forest.
    Every tree edge carries ``weight`` and the terminal ``pair`` it stems from.
    """
    tree = nx.Graph()
    tree.add_nodes_from(sorted(clusters))
    parts = UnionFind(tree.nodes)
    for a, b, weight in sorted(mst_edges, key=lambda edge: (edge[2], edge[0], edge[1])):
        x, y = owner[a], owner[b]
        if x == y or parts[x] == parts[y]:
            continue
        parts.union(x, y)
        tree.add_edge(x, y, weight=weight, pair=ordered(a, b))
    return tree


def effective_diameter(
    tree: nx.Graph, nodes: t.Iterable[int], diameters: t.Mapping[int, float]
) -> float:
    """Largest tree-path length inside ``nodes``, node diameters included.

    A path counts the weights of its tree edges plus the diameters of all
    nodes it visits. ``nodes`` should induce a subtree of ``tree``.
    """
    members = set(nodes)
    best = 0.0
    for start in members:
        stack = [(start, None, diameters[start])]
        while stack:
            node, parent, length = stack.pop()
            best = max(best, length)
            for nbr, data in tree.adj[node].items():
                if nbr != parent and nbr in members:
                    stack.append((nbr, node, length + data["weight"] + diameters[nbr]))
    return best


def _rooted_order(
    tree: nx.Graph, root: int
) -> t.Tuple[t.List[int], t.Dict[int, t.Optional[int]]]:
    parent: t.Dict[int, t.Optional[int]] = {root: None}
    order = []
    stack = [root]
    while stack:
        node = stack.pop()
        order.append(node)
        for nbr in sorted(tree.adj[node], reverse=True):
            if nbr not in parent:
                parent[nbr] = node
                stack.append(nbr)
    return order, parent


def break_tree(
    tree: nx.Graph,
    nodes: t.Iterable[int],
    ell: float,
    diameters: t.Mapping[int, float],
) -> t.List[t.FrozenSet[int]]:
    """Greedily cut a forest into pieces of effective diameter at least ``ell``.

    Every component is rooted at its smallest node and processed bottom-up.
    A node closes a piece as soon as the height of its open subtree reaches
    ``ell``. What is left at the root joins an adjacent piece, or forms a
    piece of its own when the whole component is short.

    Args:
        tree: Forest with ``weight`` edge attributes.
        nodes: Nodes to cut (the forest is restricted to them).
        ell: Target length.
        diameters: Diameter of every node.

    Returns:
        Pieces ordered by their smallest node.
    """
    forest = tree.subgraph(nodes)
    pieces: t.List[t.Set[int]] = []
    piece_of: t.Dict[int, int] = {}
    for component in sorted(
        (min(part), part) for part in nx.connected_components(forest)
    ):
        root = component[0]
        order, parent = _rooted_order(forest, root)
        height: t.Dict[int, float] = {}
        open_parts: t.Dict[int, t.Set[int]] = {}
        for node in reversed(order):
            members = {node}
            height[node] = diameters[node]
            for child in forest.adj[node]:
                if parent.get(child) != node or child not in open_parts:
                    continue
                members |= open_parts.pop(child)
                height[node] = max(
                    height[node],
                    diameters[node] + forest[node][child]["weight"] + height[child],
                )
            if height[node] >= ell:
                for member in members:
                    piece_of[member] = len(pieces)
                pieces.append(members)
            else:
                open_parts[node] = members
        leftover = open_parts.pop(root, None)
        if not leftover:
            continue
        target = next(
            (
                piece_of[nbr]
                for node in sorted(leftover)
                for nbr in sorted(forest.adj[node])
                if nbr in piece_of
            ),
            None,
        )
        if target is None:
            target = len(pieces)
            pieces.append(set())
        pieces[target] |= leftover
        for member in leftover:
            piece_of[member] = target
    return sorted((frozenset(piece) for piece in pieces), key=min)


def build_cluster_graph(
    clusters: t.Iterable[int],
    owner: t.Mapping[Vertex, int],
    bucket: t.Iterable[Edge],
    spanner: GraphBuilder,
    epsilon: float,
    g: int,
    tolerance: t.Optional[float] = None,
) -> nx.Graph:
    """Cluster graph of one level.

    Nodes are the clusters of the previous level. Every pair of clusters
    joined by bucket edges keeps its lightest edge (ties by terminal ids);
    edges whose endpoints are already within ``1 + (6g + 1) eps`` times their
    weight in the current spanner are dropped.

    Args:
        clusters: Identifiers of the previous-level clusters.
        owner: Cluster identifier of every terminal.
        bucket: Metric edges of the level.
        spanner: Spanner built so far.
        epsilon: Stretch parameter.
        g: Diameter constant.
        tolerance: Relative tolerance of the distance test.
            (default = ``settings.tolerance``)

    Returns:
        Graph on the cluster identifiers with ``weight`` and terminal ``pair``
        edge attributes.

    Raises:
        InvariantViolation: If a bucket edge has both endpoints in one
            cluster.
    """
    factor = 1 + (6 * g + 1) * epsilon
    tolerance = settings.resolve("tolerance", tolerance)
    slack = 1 + tolerance
    lightest: t.Dict[t.Tuple[int, int], Edge] = {}
    for a, b, weight in bucket:
        x, y = owner[a], owner[b]
        if x == y:
            raise InvariantViolation(
                f"Level edge ({a}, {b}) of weight {weight} lies inside cluster {x}"
            )
        key = ordered(x, y)
        candidate = ordered(a, b) + (weight,)
        current = lightest.get(key)
        if current is None or (weight,) + candidate[:2] < (current[2],) + current[:2]:
            lightest[key] = candidate
    graph = nx.Graph()
    graph.add_nodes_from(sorted(clusters))
    dropped = 0
    for (x, y), (a, b, weight) in sorted(lightest.items()):
        limit = factor * weight
        if within_tolerance(spanner.distance(a, b, limit * slack), limit, tolerance):
            dropped += 1
            continue
        graph.add_edge(x, y, weight=weight, pair=(a, b))
    logger.debug(
        "Cluster graph: %d nodes, %d edges, %d satisfied pairs dropped",
        graph.number_of_nodes(),
        graph.number_of_edges(),
        dropped,
    )
    return graph


def sorted_edges(graph: nx.Graph) -> t.List[t.Tuple[int, int, t.Dict[str, t.Any]]]:
    """Edges of a cluster graph or tree ordered by ``(weight, pair)``."""
    return sorted(
        (ordered(x, y) + (data,) for x, y, data in graph.edges(data=True)),
        key=lambda edge: (edge[2]["weight"], edge[2]["pair"]),
    )


def diameter_bound(diameter: float, arms: t.Sequence[float]) -> float:
    """Diameter bound of a cluster with pieces attached at distance ``arms``."""
    top = sorted(arms, reverse=True)[:2]
    return diameter + math.fsum(top)
