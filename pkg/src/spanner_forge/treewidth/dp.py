"""Exact subset TSP by dynamic programming over a nice tree decomposition.

A partial solution below a node is an edge multiset ``W``. It is summarized
by an encoding: the bag vertices ``Y`` it touches, a label per vertex of
``Y`` (0: no edge yet, 1: odd degree, 2: even positive degree) and the
partition of ``Y`` induced by the components of ``W``. Every table keeps,
for each ``(Y, labels)``, a representative set of partitions (see
:func:`~spanner_forge.treewidth.partitions.reduce_representatives`) with
the lightest witness for each.

Every edge may be used with multiplicity ``1..1 + extra_copies``; this is
the parallel-copy expansion of the graph folded into the introduce-edge
step, so a decomposition of the original graph is enough.
"""

import logging
import math
import typing as t
from collections import defaultdict
from dataclasses import dataclass

import networkx as nx

from spanner_forge.config import settings
from spanner_forge.exceptions import InfeasibleError, InputError, InvariantViolation
from spanner_forge.graph import Vertex, WeightedGraph
from spanner_forge.treewidth.decomposition import (
    FORGET,
    INTRODUCE_EDGE,
    INTRODUCE_VERTEX,
    JOIN,
    LEAF,
    NiceNode,
    NiceTreeDecomposition,
    TreeDecomposition,
    heuristic_decomposition,
    make_nice,
)
from spanner_forge.treewidth.partitions import (
    Partition,
    add_singleton,
    block_of,
    canonical_partition,
    join_partitions,
    merge_elements,
    reduce_representatives,
    remove_element,
)

logger = logging.getLogger(__name__)

MultiEdge = t.Tuple[Vertex, Vertex, int]
Labels = t.Tuple[t.Tuple[Vertex, int], ...]

ABSENT, ODD, EVEN = 0, 1, 2


@dataclass(frozen=True)
class Encoding:
    """Table entry of the subset-TSP dynamic program.

    Args:
        present: Bag vertices touched by the partial solution.
        labels: ``(vertex, label)`` pairs sorted by vertex.
        partition: Partition of ``present``.
        weight: Weight of the witness.
        witness: Edge multiset as sorted ``(u, v, multiplicity)`` triples.
    """

    present: t.FrozenSet[Vertex]
    labels: Labels
    partition: Partition
    weight: float
    witness: t.Tuple[MultiEdge, ...]

    @property
    def key(self) -> t.Tuple[t.FrozenSet[Vertex], Labels]:
        """Group of the encoding."""
        return self.present, self.labels

    def label(self, vertex: Vertex) -> t.Optional[int]:
        """Label of ``vertex``, None if absent from ``present``."""
        return dict(self.labels).get(vertex)


EMPTY = Encoding(frozenset(), (), (), 0.0, ())


@dataclass(frozen=True)
class TourResult:
    """Optimal closed walk through all terminals.

    Args:
        weight: Tour weight.
        edges: Edge multiset as sorted ``(u, v, multiplicity)`` triples.
        width: Width of the decomposition used (-1 if none was needed).
        table_sizes: Largest table size seen.
    """

    weight: float
    edges: t.Tuple[MultiEdge, ...]
    width: int = -1
    table_sizes: int = 0

    def as_dict(self) -> t.Dict[str, t.Any]:
        """JSON-friendly ``{weight, edges}`` form."""
        return {"weight": self.weight, "edges": [list(edge) for edge in self.edges]}


def multigraph(edges: t.Iterable[MultiEdge]) -> nx.MultiGraph:
    """Networkx multigraph with one edge per copy."""
    graph = nx.MultiGraph()
    for u, v, multiplicity in edges:
        graph.add_edges_from([(u, v)] * multiplicity)
    return graph


def is_closed_cover(
    edges: t.Iterable[MultiEdge], terminals: t.Iterable[Vertex]
) -> bool:
    """Whether an edge multiset is a connected Eulerian walk through all terminals.

    An empty multiset covers at most one terminal.
    """
    graph = multigraph(edges)
    required = set(terminals)
    if not graph.number_of_edges():
        return len(required) <= 1
    return (
        required <= set(graph.nodes)
        and nx.is_connected(graph)
        and all(degree % 2 == 0 for _, degree in graph.degree)
    )


def check_tour(edges: t.Iterable[MultiEdge], terminals: t.Iterable[Vertex]) -> None:
    """Raise InvariantViolation unless ``edges`` is a closed terminal cover."""
    edges = tuple(edges)
    if not is_closed_cover(edges, terminals):
        raise InvariantViolation(
            "Edge multiset is not a connected Eulerian cover of the terminals"
        )


def tour_weight(graph: WeightedGraph, edges: t.Iterable[MultiEdge]) -> float:
    """Weight of an edge multiset of ``graph``."""
    return math.fsum(graph.weight(u, v) * m for u, v, m in edges)


def _relabel(labels: Labels, updates: t.Mapping[Vertex, int]) -> Labels:
    merged = dict(labels)
    merged.update(updates)
    return tuple(sorted(merged.items()))


class SubsetTspProgram:
    """Dynamic program over one nice decomposition.

    Args:
        graph: Host graph.
        terminals: Terminals to visit.
        nice: Nice tree decomposition of ``graph``.
        extra_copies: Extra parallel copies per edge (so multiplicities
            range over ``1..1 + extra_copies``).
        reduction: ``"rank"`` or ``"keep-all"``.
        verify: Re-derive every stored encoding from its witness.
    """

    def __init__(
        self,
        graph: WeightedGraph,
        terminals: t.Iterable[Vertex],
        nice: NiceTreeDecomposition,
        extra_copies: int,
        reduction: str,
        verify: bool = False,
    ):
        self.graph = graph
        self.terminals = frozenset(terminals)
        self.nice = nice
        self.max_multiplicity = 1 + extra_copies
        self.reduction = reduction
        self.verify = verify
        self.largest_table = 0

    def run(self) -> t.List[Encoding]:
        """Tables are computed bottom-up; the root table is returned."""
        tables: t.Dict[int, t.List[Encoding]] = {}
        for node in self.nice.nodes:
            children = [tables.pop(child) for child in node.children]
            tables[node.node_id] = self.process_node(node, children)
        return tables[self.nice.root]

    def process_node(
        self, node: NiceNode, children: t.Sequence[t.List[Encoding]]
    ) -> t.List[Encoding]:
        """Table of ``node`` from the tables of its children."""
        if node.kind == LEAF:
            raw = [EMPTY]
        elif node.kind == INTRODUCE_VERTEX:
            raw = self._introduce_vertex(node, children[0])
        elif node.kind == INTRODUCE_EDGE:
            raw = self._introduce_edge(node, children[0])
        elif node.kind == FORGET:
            raw = self._forget(node, children[0])
        elif node.kind == JOIN:
            raw = self._join(children[0], children[1])
        else:
            raise InvariantViolation(f"Unknown nice node kind {node.kind!r}")
        table = self._reduce(raw, node)
        if self.verify:
            for encoding in table:
                self.check_encoding(encoding, node.bag)
        self.largest_table = max(self.largest_table, len(table))
        return table

    def _introduce_vertex(self, node: NiceNode, table: t.List[Encoding]):
        v = node.vertex
        result = list(table)
        for enc in table:
            result.append(
                Encoding(
                    enc.present | {v},
                    _relabel(enc.labels, {v: ABSENT}),
                    add_singleton(enc.partition, v),
                    enc.weight,
                    enc.witness,
                )
            )
        return result

    def _introduce_edge(self, node: NiceNode, table: t.List[Encoding]):
        u, v = node.edge
        weight = self.graph.weight(u, v)
        result = list(table)
        for enc in table:
            if u not in enc.present or v not in enc.present:
                continue
            partition = merge_elements(enc.partition, u, v)
            for multiplicity in range(1, self.max_multiplicity + 1):
                updates = {}
                for x in (u, v):
                    odd = (enc.label(x) == ODD) != (multiplicity % 2 == 1)
                    updates[x] = ODD if odd else EVEN
                result.append(
                    Encoding(
                        enc.present,
                        _relabel(enc.labels, updates),
                        partition,
                        enc.weight + multiplicity * weight,
                        tuple(sorted(enc.witness + ((u, v, multiplicity),))),
                    )
                )
        return result

    def _forget(self, node: NiceNode, table: t.List[Encoding]):
        v = node.vertex
        terminal = v in self.terminals
        result = []
        for enc in table:
            label = enc.label(v)
            if label is None:
                if not terminal:
                    result.append(enc)
                continue
            if label == ODD or (label == ABSENT and terminal):
                continue
            if label == EVEN and block_of(enc.partition, v) == (v,):
                if not is_closed_cover(enc.witness, self.terminals):
                    continue
            result.append(
                Encoding(
                    enc.present - {v},
                    tuple((x, c) for x, c in enc.labels if x != v),
                    remove_element(enc.partition, v),
                    enc.weight,
                    enc.witness,
                )
            )
        return result

    @staticmethod
    def _combine(x: int, y: int) -> int:
        if x == ABSENT and y == ABSENT:
            return ABSENT
        return ODD if (x + y) % 2 else EVEN

    def _join(self, left: t.List[Encoding], right: t.List[Encoding]):
        by_present: t.Dict[t.FrozenSet[Vertex], t.List[Encoding]] = defaultdict(list)
        for enc in right:
            by_present[enc.present].append(enc)
        result = []
        for a in left:
            labels_a = dict(a.labels)
            for b in by_present.get(a.present, ()):
                labels = tuple(
                    (x, self._combine(labels_a[x], c)) for x, c in b.labels
                )
                result.append(
                    Encoding(
                        a.present,
                        labels,
                        join_partitions(a.partition, b.partition),
                        a.weight + b.weight,
                        tuple(sorted(a.witness + b.witness)),
                    )
                )
        return result

    def _reduce(self, raw: t.Iterable[Encoding], node: NiceNode) -> t.List[Encoding]:
        groups: t.Dict[t.Any, t.List[Encoding]] = defaultdict(list)
        for enc in raw:
            groups[enc.key].append(enc)
        table = []
        for (present, _), group in sorted(
            groups.items(), key=lambda item: (sorted(item[0][0]), item[0][1])
        ):
            kept = reduce_representatives(group, present, self.reduction)
            if self.reduction == "rank" and len(kept) > max(
                1, 2 ** (len(present) - 1)
            ):
                raise InvariantViolation(
                    f"Group of {len(kept)} partitions over {len(present)} vertices "
                    f"at node {node.node_id}"
                )
            table.extend(kept)
        if self.reduction == "rank" and len(table) > 12 ** max(len(node.bag), 1):
            raise InvariantViolation(
                f"Table of node {node.node_id} holds {len(table)} encodings"
            )
        return table

    def check_encoding(self, encoding: Encoding, bag: t.AbstractSet[Vertex]) -> None:
        """Re-derive labels, partition and weight of an encoding from its witness.

        Raises:
            InvariantViolation: On any mismatch.
        """
        graph = multigraph(encoding.witness)
        weight = tour_weight(self.graph, encoding.witness)
        problems = []
        if not math.isclose(weight, encoding.weight, rel_tol=1e-9, abs_tol=1e-12):
            problems.append(f"weight {encoding.weight} != {weight}")
        for vertex in graph.nodes:
            if vertex in bag and vertex not in encoding.present:
                problems.append(f"bag vertex {vertex} is touched but absent")
            elif vertex not in bag and graph.degree(vertex) % 2:
                problems.append(f"forgotten vertex {vertex} has odd degree")
        for vertex, label in encoding.labels:
            degree = graph.degree(vertex) if vertex in graph else 0
            expected = ABSENT if degree == 0 else (ODD if degree % 2 else EVEN)
            if label != expected:
                problems.append(f"label of {vertex} is {label}, degree {degree}")
        components = canonical_partition(
            [x for x in component if x in encoding.present]
            for component in nx.connected_components(graph)
            if not encoding.present.isdisjoint(component)
        )
        untouched = tuple((x,) for x in encoding.present if x not in graph)
        if encoding.partition != canonical_partition(components + untouched):
            problems.append(f"partition {encoding.partition} != {components}")
        if problems:
            raise InvariantViolation("Inconsistent encoding: " + "; ".join(problems))


def subset_tsp_dp(
    graph: WeightedGraph,
    terminals: t.Iterable[Vertex],
    decomposition: t.Union[TreeDecomposition, NiceTreeDecomposition, None] = None,
    *,
    extra_copies: t.Optional[int] = None,
    reduction: t.Optional[str] = None,
    heuristic: str = "min-degree",
    verify: bool = False,
) -> TourResult:
    """Minimum-weight closed walk visiting every terminal.

    Args:
        graph: Host graph.
        terminals: Terminals to visit.
        decomposition: Tree decomposition (plain or nice) of ``graph``.
            (default = heuristic decomposition)
        extra_copies: Extra parallel copies of every edge. (default = k - 1)
        reduction: Representative-set reduction ``"rank"`` or ``"keep-all"``.
            (default = ``settings.reduction``)
        heuristic: Heuristic used when no decomposition is given.
            (default = "min-degree")
        verify: Check every stored encoding against its witness.
            (default = False)

    Returns:
        Tour weight and edge multiset.

    Raises:
        InputError: If a terminal is unknown or the decomposition does not
            fit the graph.
        InfeasibleError: If the terminals are not connected.
    """
    terminal_set = frozenset(terminals)
    for terminal in sorted(terminal_set):
        graph.require_vertex(terminal)
    if len(terminal_set) <= 1:
        return TourResult(0.0, ())
    component = nx.node_connected_component(graph.nx_graph, min(terminal_set))
    stranded = sorted(terminal_set - component)
    if stranded:
        raise InfeasibleError(
            f"Terminal {stranded[0]} is not connected to terminal "
            f"{min(terminal_set)}",
            pair=(min(terminal_set), stranded[0]),
        )
    extra = len(terminal_set) - 1 if extra_copies is None else extra_copies
    if extra < 0:
        raise InputError(f"extra_copies must be non-negative, got {extra}")
    reduction = settings.resolve("reduction", reduction)

    if decomposition is None:
        decomposition = heuristic_decomposition(graph, heuristic)
    if isinstance(decomposition, TreeDecomposition):
        nice = make_nice(decomposition, graph)
    else:
        try:
            decomposition.check(graph)
        except InvariantViolation as error:
            raise InputError(
                f"Nice decomposition does not fit the graph: {error}"
            ) from error
        nice = decomposition

    program = SubsetTspProgram(graph, terminal_set, nice, extra, reduction, verify)
    root = program.run()
    if not root:
        raise InfeasibleError("No closed walk visits every terminal")
    best = min(root, key=lambda enc: (enc.weight, enc.witness))
    check_tour(best.witness, terminal_set)
    result = TourResult(
        tour_weight(graph, best.witness),
        best.witness,
        nice.width,
        program.largest_table,
    )
    logger.info(
        "Subset TSP over %d terminals: weight %g (width %d, largest table %d)",
        len(terminal_set),
        result.weight,
        nice.width,
        program.largest_table,
    )
    return result
