"""Tree decompositions, nice tree decompositions and the PACE ``.td`` format.

PACE files number vertices from 1; in memory vertices keep the 0-based ids of
the graph JSON format.
"""

import logging
import typing as t
from dataclasses import dataclass, field
from pathlib import Path

import networkx as nx
from networkx.algorithms.approximation import (
    treewidth_min_degree,
    treewidth_min_fill_in,
)

from spanner_forge.exceptions import InputError, InvariantViolation
from spanner_forge.graph import Vertex, WeightedGraph, ordered

logger = logging.getLogger(__name__)

Bag = t.FrozenSet[Vertex]
Pair = t.Tuple[Vertex, Vertex]

LEAF = "leaf"
INTRODUCE_VERTEX = "introduce_vertex"
INTRODUCE_EDGE = "introduce_edge"
FORGET = "forget"
JOIN = "join"

HEURISTICS: t.Dict[str, t.Callable[[nx.Graph], t.Tuple[int, nx.Graph]]] = {
    "min-degree": treewidth_min_degree,
    "min-fill": treewidth_min_fill_in,
}


@dataclass(frozen=True)
class TreeDecomposition:
    """Tree of bags over the vertices of a graph.

    Args:
        bags: Vertex set of every tree node.
        edges: Tree edges between node ids.
    """

    bags: t.Dict[int, Bag]
    edges: t.Tuple[t.Tuple[int, int], ...] = ()

    @property
    def width(self) -> int:
        """Largest bag size minus one."""
        return max((len(bag) for bag in self.bags.values()), default=0) - 1

    def tree(self) -> nx.Graph:
        """The decomposition tree as a networkx graph."""
        tree = nx.Graph()
        tree.add_nodes_from(sorted(self.bags))
        tree.add_edges_from(self.edges)
        return tree

    def validate(self, graph: WeightedGraph) -> None:
        """Check the tree decomposition axioms against ``graph``.

        Raises:
            InputError: Naming the first violated axiom.
        """
        if not self.bags:
            if len(graph):
                raise InputError("Vertex coverage violated: decomposition is empty")
            return
        tree = self.tree()
        unknown = {node for edge in self.edges for node in edge} - set(self.bags)
        if unknown:
            raise InputError(f"Tree axiom violated: edges use unknown bags {unknown}")
        if not nx.is_tree(tree):
            raise InputError("Tree axiom violated: the bags do not form a tree")
        holders: t.Dict[Vertex, t.Set[int]] = {v: set() for v in graph.vertices}
        for node, bag in self.bags.items():
            for vertex in bag:
                if vertex not in holders:
                    raise InputError(
                        f"Vertex coverage violated: bag {node} holds unknown "
                        f"vertex {vertex!r}"
                    )
                holders[vertex].add(node)
        for vertex, nodes in holders.items():
            if not nodes:
                raise InputError(
                    f"Vertex coverage violated: vertex {vertex!r} is in no bag"
                )
            if not nx.is_connected(tree.subgraph(nodes)):
                raise InputError(
                    f"Connectivity violated: bags holding vertex {vertex!r} are "
                    "not connected"
                )
        for u, v, _ in graph.edges():
            if not holders[u] & holders[v]:
                raise InputError(
                    f"Edge coverage violated: no bag holds edge ({u}, {v})"
                )


def heuristic_decomposition(
    graph: WeightedGraph, method: str = "min-degree"
) -> TreeDecomposition:
    """Tree decomposition from a networkx elimination heuristic.

    Args:
        graph: Graph to decompose.
        method: ``"min-degree"`` or ``"min-fill"``. (default = "min-degree")

    Raises:
        InputError: On an unknown method.
    """
    try:
        heuristic = HEURISTICS[method]
    except KeyError as error:
        raise InputError(
            f"Unknown decomposition heuristic {method!r}; use one of "
            f"{sorted(HEURISTICS)}"
        ) from error
    if not len(graph):
        return TreeDecomposition({})
    width, decomposition = heuristic(graph.nx_graph)
    index = {
        bag: position
        for position, bag in enumerate(
            sorted(decomposition.nodes, key=lambda bag: sorted(bag))
        )
    }
    edges = tuple(sorted(ordered(index[a], index[b]) for a, b in decomposition.edges))
    logger.debug("%s decomposition of width %d", method, width)
    return TreeDecomposition({i: frozenset(bag) for bag, i in index.items()}, edges)


def loads_pace_td(text: str) -> TreeDecomposition:
    """Parse a decomposition in the PACE ``.td`` format.

    Raises:
        InputError: If the text is malformed.
    """
    bags: t.Dict[int, Bag] = {}
    edges = []
    header = None
    for number, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens or tokens[0] == "c":
            continue
        try:
            if tokens[0] == "s":
                if tokens[1] != "td" or len(tokens) != 5:
                    raise ValueError("expected 's td <bags> <width+1> <vertices>'")
                header = tuple(int(token) for token in tokens[2:])
            elif tokens[0] == "b":
                bag_id = int(tokens[1])
                bags[bag_id] = frozenset(int(token) - 1 for token in tokens[2:])
            else:
                a, b = (int(token) for token in tokens)
                edges.append(ordered(a, b))
        except ValueError as error:
            raise InputError(f"Malformed .td line {number}: {error}") from error
    if header is None:
        raise InputError("Missing 's td' header line")
    if header[0] != len(bags):
        raise InputError(f"Header announces {header[0]} bags, found {len(bags)}")
    return TreeDecomposition(bags, tuple(sorted(edges)))


def read_pace_td(path: t.Union[str, Path]) -> TreeDecomposition:
    """Read a PACE ``.td`` file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as error:
        raise InputError(f"Cannot read {path}: {error}") from error
    return loads_pace_td(text)


def dumps_pace_td(decomposition: TreeDecomposition, n_vertices: int) -> str:
    """Serialize a decomposition in the PACE ``.td`` format."""
    lines = [
        f"s td {len(decomposition.bags)} {decomposition.width + 1} {n_vertices}"
    ]
    for node in sorted(decomposition.bags):
        members = " ".join(str(v + 1) for v in sorted(decomposition.bags[node]))
        lines.append(f"b {node} {members}".rstrip())
    lines.extend(f"{a} {b}" for a, b in decomposition.edges)
    return "\n".join(lines) + "\n"


def write_pace_td(
    decomposition: TreeDecomposition, n_vertices: int, path: t.Union[str, Path]
) -> None:
    """Write a PACE ``.td`` file."""
    Path(path).write_text(dumps_pace_td(decomposition, n_vertices), encoding="utf-8")


@dataclass(frozen=True)
class NiceNode:
    """Node of a nice tree decomposition.

    Args:
        node_id: Position in the post-order of the decomposition.
        kind: One of leaf, introduce_vertex, introduce_edge, forget, join.
        bag: Vertex bag.
        edge_bag: Edges introduced below the node between bag vertices.
        children: Child node ids.
        vertex: Vertex introduced or forgotten.
        edge: Edge introduced.
    """

    node_id: int
    kind: str
    bag: Bag
    edge_bag: t.FrozenSet[Pair] = field(repr=False)
    children: t.Tuple[int, ...] = ()
    vertex: t.Optional[Vertex] = None
    edge: t.Optional[Pair] = None


@dataclass(frozen=True)
class NiceTreeDecomposition:
    """Nice tree decomposition in post-order (children before parents).

    Args:
        nodes: All nodes; ``nodes[i].node_id == i``.
        root: Id of the root node (the last one).
    """

    nodes: t.Tuple[NiceNode, ...]
    root: int

    @property
    def width(self) -> int:
        """Largest bag size minus one."""
        return max((len(node.bag) for node in self.nodes), default=0) - 1

    def count(self, kind: str) -> int:
        """Number of nodes of a kind."""
        return sum(1 for node in self.nodes if node.kind == kind)

    def check(self, graph: t.Optional[WeightedGraph] = None) -> None:
        """Verify the structural rules of every node.

        Args:
            graph: If given, every edge of it must be introduced exactly once.

        Raises:
            InvariantViolation: Naming the first broken rule.
        """
        introduced: t.List[Pair] = []
        root = self.nodes[self.root]
        if root.bag or root.edge_bag:
            raise InvariantViolation("Root bag of a nice decomposition must be empty")
        for node in self.nodes:
            kids = [self.nodes[child] for child in node.children]
            if node.kind == LEAF:
                ok = not kids and not node.bag and not node.edge_bag
            elif node.kind == INTRODUCE_VERTEX:
                (kid,) = kids
                ok = (
                    node.vertex not in kid.bag
                    and node.bag == kid.bag | {node.vertex}
                    and node.edge_bag == kid.edge_bag
                )
            elif node.kind == INTRODUCE_EDGE:
                (kid,) = kids
                ok = (
                    node.bag == kid.bag
                    and set(node.edge) <= node.bag
                    and node.edge not in kid.edge_bag
                    and node.edge_bag == kid.edge_bag | {node.edge}
                )
                introduced.append(node.edge)
            elif node.kind == FORGET:
                (kid,) = kids
                ok = (
                    node.vertex in kid.bag
                    and node.bag == kid.bag - {node.vertex}
                    and node.edge_bag
                    == frozenset(e for e in kid.edge_bag if node.vertex not in e)
                )
            elif node.kind == JOIN:
                left, right = kids
                ok = (
                    node.bag == left.bag == right.bag
                    and not left.edge_bag & right.edge_bag
                    and node.edge_bag == left.edge_bag | right.edge_bag
                )
            else:
                ok = False
            if not ok:
                raise InvariantViolation(
                    f"Nice node {node.node_id} breaks the {node.kind} rules"
                )
        if len(introduced) != len(set(introduced)):
            raise InvariantViolation("An edge is introduced more than once")
        if graph is not None:
            expected = {ordered(u, v) for u, v, _ in graph.edges()}
            if set(introduced) != expected:
                raise InvariantViolation(
                    "Introduced edges differ from the graph edges: "
                    f"missing {sorted(expected - set(introduced))[:5]}"
                )


class _NiceBuilder:
    def __init__(self, graph: WeightedGraph):
        self.graph = graph
        self.nodes: t.List[NiceNode] = []
        self.introduced: t.Set[Pair] = set()

    def add(self, kind: str, bag, edge_bag, children=(), vertex=None, edge=None) -> int:
        node = NiceNode(
            len(self.nodes),
            kind,
            frozenset(bag),
            frozenset(edge_bag),
            tuple(children),
            vertex,
            edge,
        )
        self.nodes.append(node)
        return node.node_id

    def move(self, node_id: int, target: Bag) -> int:
        current = self.nodes[node_id]
        for vertex in sorted(current.bag - target):
            node_id = self.add(
                FORGET,
                current.bag - {vertex},
                (e for e in current.edge_bag if vertex not in e),
                (node_id,),
                vertex=vertex,
            )
            current = self.nodes[node_id]
        for vertex in sorted(target - current.bag):
            node_id = self.add(
                INTRODUCE_VERTEX,
                current.bag | {vertex},
                current.edge_bag,
                (node_id,),
                vertex=vertex,
            )
            current = self.nodes[node_id]
        return node_id

    def introduce_edges(self, node_id: int) -> int:
        current = self.nodes[node_id]
        for u, v, _ in self.graph.edges():
            pair = ordered(u, v)
            if pair in self.introduced or u not in current.bag or v not in current.bag:
                continue
            self.introduced.add(pair)
            node_id = self.add(
                INTRODUCE_EDGE,
                current.bag,
                current.edge_bag | {pair},
                (node_id,),
                edge=pair,
            )
            current = self.nodes[node_id]
        return node_id

    def build(self, tree: nx.Graph, bags: t.Mapping[int, Bag], root: int) -> int:
        children: t.Dict[int, t.List[int]] = {}
        order = list(nx.dfs_postorder_nodes(tree, root))
        parents = dict(nx.bfs_predecessors(tree, root))
        for node in order:
            children.setdefault(parents.get(node), []).append(node)
        done: t.Dict[int, int] = {}
        for node in order:
            bag = bags[node]
            kids = sorted(children.get(node, []))
            branches = [self.move(done[kid], bag) for kid in kids]
            if not branches:
                branches = [self.move(self.add(LEAF, (), ()), bag)]
            current = branches[0]
            for other in branches[1:]:
                edge_bag = self.nodes[current].edge_bag | self.nodes[other].edge_bag
                current = self.add(JOIN, bag, edge_bag, (current, other))
            done[node] = self.introduce_edges(current)
        return self.move(done[root], frozenset())


def make_nice(
    decomposition: TreeDecomposition, graph: WeightedGraph
) -> NiceTreeDecomposition:
    """Convert a tree decomposition into a nice one of the same width.

    The tree is rooted at its smallest node. Vertices are introduced and
    forgotten in increasing id order, and every graph edge is introduced
    once, at the first node (in post-order) whose bag holds both endpoints.

    Raises:
        InputError: If ``decomposition`` is not a valid decomposition of
            ``graph``.
    """
    decomposition.validate(graph)
    builder = _NiceBuilder(graph)
    if decomposition.bags:
        root = builder.build(
            decomposition.tree(), decomposition.bags, min(decomposition.bags)
        )
    else:
        root = builder.add(LEAF, (), ())
    nice = NiceTreeDecomposition(tuple(builder.nodes), root)
    nice.check(graph)
    logger.debug(
        "Nice decomposition: %d nodes, width %d", len(nice.nodes), nice.width
    )
    return nice
