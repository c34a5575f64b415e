"""Level-by-level clustering of one scale class with credit instrumentation."""

import logging
import math
import typing as t
from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from spanner_forge.config import settings
from spanner_forge.exceptions import ContractViolation, InvariantViolation
from spanner_forge.graph import (
    Edge,
    GraphBuilder,
    TerminalMetric,
    Vertex,
    ordered,
    shortest_path,
    within_tolerance,
)
from spanner_forge.oracles import OracleQuery, SpannerOracle
from spanner_forge.subset.buckets import EdgeBuckets
from spanner_forge.subset.clusters import (
    Cluster,
    Pair,
    break_tree,
    build_cluster_graph,
    cluster_tree,
    diameter_bound,
    effective_diameter,
    mst_account,
    path_pairs,
    sorted_edges,
    terminal_diameter,
)
from spanner_forge.subset.ledger import DEFERRED, Account, CreditLedger, as_credit

logger = logging.getLogger(__name__)

PHASES = (1, 2, 3, 4)


def safety_factor(g: int) -> int:
    """Stretch constant ``s = 16g + 1`` of the level edges."""
    return 16 * g + 1


def high_degree_threshold(epsilon: float, g: int) -> int:
    """Smallest cluster-graph degree ``2g/eps + 1`` counted as high."""
    return math.ceil(2 * g / epsilon + 1)


@dataclass
class LevelReport:
    """What happened at one level of one scale class."""

    scale_class: int
    level: int
    scale: float
    cluster_graph_edges: int = 0
    high_nodes: int = 0
    oracle_edges: int = 0
    edges_bought: int = 0
    weight_bought: float = 0.0
    clusters_by_phase: t.Dict[int, int] = field(
        default_factory=lambda: {phase: 0 for phase in PHASES}
    )
    attached: int = 0
    deep_ties: int = 0
    steals: int = 0
    credit_topups: int = 0
    deferred_credit: float = 0.0
    repairs: int = 0
    ledger_residual: float = 0.0

    def as_dict(self) -> t.Dict[str, t.Any]:
        """JSON-friendly form."""
        return {
            "j": self.scale_class,
            "i": self.level,
            "scale": self.scale,
            "cluster_graph_edges": self.cluster_graph_edges,
            "high_nodes": self.high_nodes,
            "oracle_edges": self.oracle_edges,
            "edges_bought": self.edges_bought,
            "weight_bought": self.weight_bought,
            "clusters_by_phase": {str(k): v for k, v in self.clusters_by_phase.items()},
            "attached": self.attached,
            "deep_ties": self.deep_ties,
            "steals": self.steals,
            "credit_topups": self.credit_topups,
            "deferred_credit": self.deferred_credit,
            "repairs": self.repairs,
            "ledger_residual": self.ledger_residual,
        }


@dataclass
class _Group:
    phase: int
    members: t.Set[int]
    extra: t.Set[Pair] = field(default_factory=set)
    arms: t.List[float] = field(default_factory=list)
    diameter: t.Optional[float] = None


class ClusterHierarchy:
    """Cluster hierarchy, spanner and credit ledger of one scale class.

    The hierarchy starts from base clusters cut out of the spanning tree of
    the terminal metric and is advanced one level at a time with
    :meth:`advance`. Every level keeps the cluster invariants: the diameter
    of a level-``i`` cluster is at most ``g * l_i`` and its account holds at
    least ``c * max(diameter, l_i / 2)`` credit.

    Args:
        metric: Terminal metric of the host graph.
        buckets: Level buckets of the metric edges.
        scale_class: Scale class ``j`` handled by this hierarchy.
        spanner: Builder holding the spanner of the class. It must already
            contain the witness paths of all spanning-tree edges.
        mst_edges: Spanning-tree edges of the metric.
        oracle: Spanner oracle answering the high-degree queries.
        epsilon: Stretch parameter.
        credit_rate: Credit ``c`` per unit of weight.
        g: Diameter constant. (default = ``settings.cluster_g``)
        degree_threshold: High-degree threshold of the cluster graph.
            (default = ``settings.degree_threshold`` or ``2g/eps + 1``)
        tolerance: Relative tolerance of distance comparisons.
            (default = ``settings.tolerance``)
    """

    def __init__(
        self,
        metric: TerminalMetric,
        buckets: EdgeBuckets,
        scale_class: int,
        spanner: GraphBuilder,
        mst_edges: t.Sequence[Edge],
        oracle: SpannerOracle,
        epsilon: float,
        credit_rate: t.Union[float, Fraction],
        *,
        g: t.Optional[int] = None,
        degree_threshold: t.Optional[int] = None,
        tolerance: t.Optional[float] = None,
    ):
        self.metric = metric
        self.graph = metric.graph
        self.buckets = buckets
        self.scale_class = scale_class
        self.spanner = spanner
        self.mst_edges = tuple(mst_edges)
        self.oracle = oracle
        self.epsilon = epsilon
        self.credit_rate = as_credit(credit_rate)
        self.g = settings.resolve("cluster_g", g)
        self.degree_threshold = settings.resolve(
            "degree_threshold", degree_threshold
        ) or high_degree_threshold(epsilon, self.g)
        self.tolerance = settings.resolve("tolerance", tolerance)
        self.ledger = CreditLedger()
        self.level = -1
        self.clusters: t.Dict[int, Cluster] = {}
        self.owner: t.Dict[Vertex, int] = {}
        self.reports: t.List[LevelReport] = []
        self._mst_credit: t.Dict[Pair, Fraction] = {}
        self._mst_at: t.Dict[Vertex, t.List[Pair]] = defaultdict(list)
        self._slots_used: t.Set[t.Tuple[Pair, Vertex]] = set()
        self._report: t.Optional[LevelReport] = None
        self._mint_tree_credit()
        self._build_base()

    def scale(self, level: int) -> float:
        """Length scale ``l_i`` of a level of this class."""
        return self.buckets.scale(self.scale_class, level)

    @property
    def repairs(self) -> int:
        """Level edges repaired by the safety net so far."""
        return sum(report.repairs for report in self.reports)

    @property
    def credit_topups(self) -> int:
        """Clusters whose credit requirement needed deferred credit."""
        return sum(report.credit_topups for report in self.reports)

    def _mint_tree_credit(self) -> None:
        w0 = as_credit(self.buckets.w0)
        for a, b, weight in self.mst_edges:
            pair = ordered(a, b)
            slots = max(1, math.ceil(weight / self.buckets.w0)) if w0 else 1
            amount = self.credit_rate * w0 * slots
            self.ledger.mint(mst_account(a, b), amount, "spanning-tree edge")
            self._mst_credit[pair] = amount
            self._mst_at[a].append(pair)
            self._mst_at[b].append(pair)

    def _tree_edge_pairs(self, a: Vertex, b: Vertex) -> t.Set[Pair]:
        return path_pairs(self.metric.path(a, b))

    def _build_base(self) -> None:
        ell = self.scale(-1)
        forest = nx.Graph()
        forest.add_nodes_from(self.metric.terminals)
        for a, b, weight in self.mst_edges:
            if weight <= ell:
                forest.add_edge(a, b, weight=weight)
        self._report = LevelReport(self.scale_class, -1, ell)
        pieces = break_tree(
            forest, forest.nodes, ell, {v: 0.0 for v in self.metric.terminals}
        )
        clusters = {}
        for cid, piece in enumerate(pieces):
            edges: t.Set[Pair] = set()
            for a, b in forest.subgraph(piece).edges:
                edges |= self._tree_edge_pairs(a, b)
            clusters[cid] = Cluster(
                cid,
                -1,
                0,
                frozenset(piece),
                edges=frozenset(edges),
                diameter=terminal_diameter(self.graph, edges, piece),
            )
        for cluster in clusters.values():
            self._maintain(cluster, ell, {})
        self._install(clusters, ell)
        self._report.ledger_residual = float(self.ledger.residual)
        self.reports.append(self._report)
        logger.debug(
            "Class %d: %d base clusters at scale %g",
            self.scale_class,
            len(clusters),
            ell,
        )

    def _install(self, clusters: t.Dict[int, Cluster], ell: float) -> None:
        for cluster in clusters.values():
            if not within_tolerance(cluster.diameter, self.g * ell, self.tolerance):
                raise InvariantViolation(
                    f"Cluster {cluster.cid} of level {cluster.level} has diameter "
                    f"{cluster.diameter} above g * l = {self.g * ell}"
                )
        self.clusters = clusters
        self.owner = {
            terminal: cluster.cid
            for cluster in clusters.values()
            for terminal in cluster.terminals
        }

    def requirement(self, cluster: Cluster, ell: float) -> Fraction:
        """Credit a cluster must hold: ``c * max(diameter, l / 2)``."""
        return self.credit_rate * as_credit(max(cluster.diameter, ell / 2))

    def _internal_tree_accounts(self, cluster: Cluster) -> t.List[Account]:
        pairs = {
            pair
            for terminal in cluster.terminals
            for pair in self._mst_at[terminal]
            if pair[0] in cluster.terminals and pair[1] in cluster.terminals
        }
        return [("mst",) + pair for pair in sorted(pairs)]

    def _maintain(
        self, cluster: Cluster, ell: float, previous: t.Mapping[int, Cluster]
    ) -> None:
        target = cluster.account
        missing = self.requirement(cluster, ell) - self.ledger.balance(target)
        if missing <= 0:
            return
        reason = f"upkeep of cluster {cluster.cid} at level {cluster.level}"
        sources = self._internal_tree_accounts(cluster) + [
            previous[child].account for child in sorted(cluster.children)
        ]
        missing = self.ledger.take(sources, target, missing, reason)
        for terminal in sorted(cluster.terminals):
            for pair in self._mst_at[terminal]:
                if missing <= 0:
                    break
                other = pair[1] if pair[0] == terminal else pair[0]
                if other in cluster.terminals or (pair, terminal) in self._slots_used:
                    continue
                self._slots_used.add((pair, terminal))
                half = min(
                    self._mst_credit[pair] / 2,
                    self.ledger.balance(("mst",) + pair),
                    missing,
                )
                if half > 0:
                    self.ledger.transfer(("mst",) + pair, target, half, reason)
                    missing -= half
        if missing > 0:
            self.ledger.mint_deferred(target, missing, reason)
            self._report.credit_topups += 1
            self._report.deferred_credit += float(missing)

    def _buy(self, path: t.Sequence[Vertex]) -> Fraction:
        cost = self.spanner.add_path(path)
        self._report.weight_bought += cost
        return as_credit(cost)

    def _realize(self, u: Vertex, v: Vertex, weight: float) -> t.List[Vertex]:
        if u not in self.graph or v not in self.graph:
            raise ContractViolation(
                f"Oracle {self.oracle.name} returned edge ({u!r}, {v!r}) outside "
                "the host graph"
            )
        if self.graph.has_edge(u, v) and within_tolerance(
            self.graph.weight(u, v), weight, self.tolerance
        ):
            return [u, v]
        if u in self.metric.index and v in self.metric.index:
            return list(self.metric.path(u, v))
        return shortest_path(self.graph, u, v)

    def query_oracle(
        self, level: int, terminals: t.Sequence[Vertex], scale: float
    ) -> Fraction:
        """Add the oracle's answer for ``terminals`` at ``scale`` to the spanner.

        Returns:
            Weight newly added.

        Raises:
            ContractViolation: If the oracle breaks its contract, with the query
                context attached.
        """
        query = OracleQuery(tuple(terminals), scale, self.epsilon)
        try:
            output = self.oracle.query(query)
            paths = [self._realize(u, v, w) for u, v, w in output.edges()]
        except ContractViolation as error:
            raise ContractViolation(
                f"Oracle {self.oracle.name} failed at class {self.scale_class}, "
                f"level {level} (|T|={len(terminals)}, l={scale:g}): {error}"
            ) from error
        self._report.oracle_edges += output.number_of_edges()
        return sum((self._buy(path) for path in paths), Fraction(0))

    def advance(self) -> t.Dict[int, Cluster]:
        """Build the clusters of the next level.

        Returns:
            The new clusters by identifier.
        """
        level = self.level + 1
        ell = self.scale(level)
        self._report = LevelReport(self.scale_class, level, ell)
        edges_before = self.spanner.number_of_edges()
        bucket = self.buckets.edges(self.scale_class, level)
        graph = build_cluster_graph(
            self.clusters,
            self.owner,
            bucket,
            self.spanner,
            self.epsilon,
            self.g,
            self.tolerance,
        )
        tree = cluster_tree(self.clusters, self.owner, self.mst_edges)
        clusters, charges = self.cluster_level(level, graph, tree)
        self._settle(clusters, charges, tree, ell)
        previous = self.clusters
        self._install(clusters, ell)
        self.level = level
        self.safety_net(bucket)
        self._report.edges_bought = self.spanner.number_of_edges() - edges_before
        self._report.ledger_residual = float(self.ledger.residual)
        self.reports.append(self._report)
        logger.debug(
            "Class %d level %d: %d -> %d clusters, %d edges bought",
            self.scale_class,
            level,
            len(previous),
            len(clusters),
            self._report.edges_bought,
        )
        return clusters

    def cluster_level(
        self, level: int, graph: nx.Graph, tree: nx.Graph
    ) -> t.Tuple[t.Dict[int, Cluster], t.Dict[int, Fraction]]:
        """Group the current clusters into the clusters of ``level``.

        Args:
            level: Level being built.
            graph: Cluster graph of the level.
            tree: Cluster tree of the current clusters.

        Returns:
            The new clusters and the purchase cost charged to every current
            cluster.
        """
        builder = _LevelBuilder(self, level, graph, tree)
        return builder.run()

    def _steal_source(
        self,
        cluster: Cluster,
        tree: nx.Graph,
        parent_of: t.Mapping[int, Cluster],
        stolen: t.Set[int],
    ) -> t.Optional[Account]:
        seen = set(cluster.children)
        queue = deque(sorted(cluster.children))
        while queue:
            node = queue.popleft()
            for nbr in sorted(tree.adj[node]):
                if nbr in seen:
                    continue
                seen.add(nbr)
                if parent_of[nbr].phase < 4 and nbr not in stolen:
                    stolen.add(nbr)
                    return self.clusters[nbr].account
                queue.append(nbr)
        return None

    def _settle(
        self,
        clusters: t.Mapping[int, Cluster],
        charges: t.Mapping[int, Fraction],
        tree: nx.Graph,
        ell: float,
    ) -> None:
        for cluster in clusters.values():
            self._maintain(cluster, ell, self.clusters)
        parent_of = {
            child: cluster
            for cluster in clusters.values()
            for child in cluster.children
        }
        stolen: t.Set[int] = set()
        for child in sorted(charges):
            amount = charges[child]
            if amount <= 0:
                continue
            parent = parent_of[child]
            own = self.clusters[child].account
            sources = [own] + [
                self.clusters[sibling].account
                for sibling in parent.children
                if sibling != child
            ]
            if parent.phase == 4:
                source = self._steal_source(parent, tree, parent_of, stolen)
                if source is not None:
                    sources.append(source)
                    self._report.steals += 1
            reason = f"purchases of cluster {child} at level {parent.level}"
            missing = self.ledger.pay(sources, amount, reason)
            if missing > 0:
                self.ledger.mint_deferred(own, missing, reason)
                self.ledger.debit(own, missing, reason)
                self._report.deferred_credit += float(missing)
        for cluster in clusters.values():
            for child in cluster.children:
                account = self.clusters[child].account
                leftover = self.ledger.balance(account)
                if leftover > 0:
                    self.ledger.transfer(account, cluster.account, leftover, "merge")

    def safety_net(self, bucket: t.Iterable[Edge]) -> int:
        """Repair level edges whose stretch exceeds ``1 + s * eps``.

        A failing edge gets its witness path, paid from deferred credit.

        Returns:
            Number of repaired edges.
        """
        factor = 1 + safety_factor(self.g) * self.epsilon
        repaired = 0
        for a, b, weight in bucket:
            limit = factor * weight
            reach = limit * (1 + self.tolerance)
            if within_tolerance(
                self.spanner.distance(a, b, reach), limit, self.tolerance
            ):
                continue
            cost = as_credit(self.spanner.add_path(self.metric.path(a, b)))
            reason = f"repair of ({a}, {b})"
            self.ledger.mint_deferred(DEFERRED, cost, reason)
            self.ledger.debit(DEFERRED, cost, reason)
            self._report.deferred_credit += float(cost)
            repaired += 1
            logger.info(
                "Level edge (%s, %s) of weight %g exceeded stretch %g and was repaired",
                a,
                b,
                weight,
                factor,
            )
        self._report.repairs += repaired
        return repaired

    def run(self, last_level: t.Optional[int] = None) -> GraphBuilder:
        """Advance through all levels of the class and check the ledger.

        Args:
            last_level: Last level to build.
                (default = highest level holding edges of this class)

        Returns:
            The spanner builder of the class.
        """
        if last_level is None:
            last_level = self.buckets.top_level(self.scale_class)
        while self.level < last_level:
            self.advance()
        self.ledger.check_conservation()
        return self.spanner


class _LevelBuilder:
    def __init__(
        self, hierarchy: ClusterHierarchy, level: int, graph: nx.Graph, tree: nx.Graph
    ):
        self.h = hierarchy
        self.level = level
        self.ell = hierarchy.scale(level)
        self.graph = graph
        self.tree = tree
        self.report = hierarchy._report
        self.diameters = {cid: c.diameter for cid, c in hierarchy.clusters.items()}
        self.charges: t.Dict[int, Fraction] = defaultdict(Fraction)
        self.groups: t.List[_Group] = []
        self.assigned: t.Dict[int, int] = {}
        self.high: t.Set[int] = set()

    def run(self) -> t.Tuple[t.Dict[int, Cluster], t.Dict[int, Fraction]]:
        self.report.cluster_graph_edges = self.graph.number_of_edges()
        self.high = {
            node
            for node, degree in self.graph.degree
            if degree >= self.h.degree_threshold
        }
        self.report.high_nodes = len(self.high)
        self.step_one()
        self.step_two()
        self.phase_one()
        self.phase_two()
        self.phase_three()
        self.phase_four()
        return self.finish(), dict(self.charges)

    def _group(self, phase: int, members: t.Iterable[int]) -> _Group:
        group = _Group(phase, set(members))
        for node in group.members:
            self.assigned[node] = len(self.groups)
        self.groups.append(group)
        return group

    def _witness(self, data: t.Mapping[str, t.Any]) -> t.List[Vertex]:
        return list(self.h.metric.path(*data["pair"]))

    def step_one(self) -> None:
        """Buy the witness path of every cluster-graph edge at a low node."""
        for x, y, data in sorted_edges(self.graph):
            if x in self.high and y in self.high:
                continue
            payer = x if x not in self.high else y
            self.charges[payer] += self.h._buy(self._witness(data))

    def step_two(self) -> None:
        """Query the oracle on one terminal per high-degree node."""
        if len(self.high) < 2:
            return
        terminals = sorted(self.h.clusters[node].representative for node in self.high)
        cost = self.h.query_oracle(self.level, terminals, 2 * self.ell)
        share = cost / len(self.high)
        for node in sorted(self.high):
            self.charges[node] += share

    def _connect(self, group: _Group, x: int, y: int, center: int) -> None:
        data = self.graph[x][y]
        a, b = data["pair"]
        if x in self.high and y in self.high:
            limit = (1 + self.h.epsilon) * data["weight"]
            path = self.h.spanner.path(a, b, limit * (1 + self.h.tolerance))
            if path is not None:
                group.extra |= path_pairs(path)
                return
        path = self._witness(data)
        self.charges[center] += self.h._buy(path)
        group.extra |= path_pairs(path)

    def phase_one(self) -> None:
        """High-degree nodes gather their cluster-graph neighbors."""
        for node in sorted(self.high):
            if node in self.assigned:
                continue
            taken = [nbr for nbr in sorted(self.graph[node]) if nbr in self.assigned]
            if taken:
                index = self.assigned[taken[0]]
                group = self.groups[index]
                group.members.add(node)
                self.assigned[node] = index
                self._connect(group, node, taken[0], node)
                continue
            group = self._group(1, [node])
            for nbr in sorted(self.graph[node]):
                if nbr not in self.assigned:
                    group.members.add(nbr)
                    self.assigned[nbr] = len(self.groups) - 1
                    self._connect(group, node, nbr, node)

    def _free_neighbors(self, node: int) -> t.List[int]:
        return sorted(
            nbr
            for nbr, data in self.tree.adj[node].items()
            if nbr not in self.assigned and data["weight"] <= self.ell
        )

    def _grow(self, node: int) -> t.Optional[t.Set[int]]:
        members = {node, *self._free_neighbors(node)}
        queue = deque(sorted(members - {node}))
        while self._length(members) < self.ell:
            grown = False
            while queue and not grown:
                options = [
                    nbr for nbr in self._free_neighbors(queue[0]) if nbr not in members
                ]
                if not options:
                    queue.popleft()
                    continue
                members.add(options[0])
                queue.append(options[0])
                grown = True
            if not grown:
                return None
        return members

    def phase_two(self) -> None:
        """Branching nodes of the working forest grow subtrees of length ``l``."""
        progress = True
        while progress:
            progress = False
            for node in sorted(self.tree.nodes):
                if node in self.assigned or len(self._free_neighbors(node)) < 3:
                    continue
                members = self._grow(node)
                if members is not None:
                    self._group(2, members)
                    progress = True

    def _free_path(self, node: int) -> t.Optional[t.List[int]]:
        component = {node}
        stack = [node]
        while stack:
            current = stack.pop()
            free = self._free_neighbors(current)
            if len(free) > 2:
                return None
            for nbr in free:
                if nbr not in component:
                    component.add(nbr)
                    stack.append(nbr)
        start = min(v for v in component if len(self._free_neighbors(v)) <= 1)
        path = [start]
        while len(path) < len(component):
            path.append(
                next(
                    nbr
                    for nbr in self._free_neighbors(path[-1])
                    if nbr not in path[-2:]
                )
            )
        return path

    def _length(self, nodes: t.Iterable[int]) -> float:
        return effective_diameter(self.tree, nodes, self.diameters)

    def _deep_window(self, node: int) -> t.Optional[t.List[int]]:
        path = self._free_path(node)
        if path is None:
            return None
        position = path.index(node)
        left = self._length(path[:position])
        right = self._length(path[position + 1 :])
        if left == self.ell or right == self.ell:
            self.report.deep_ties += 1
            logger.info(
                "Node %d sits exactly at depth %g of its path and is not deep",
                node,
                self.ell,
            )
        if left <= self.ell or right <= self.ell:
            return None
        low = position - 1
        while self._length(path[low:position]) < self.ell:
            low -= 1
        high = position + 1
        while self._length(path[position + 1 : high + 1]) < self.ell:
            high += 1
        return path[low : high + 1]

    def phase_three(self) -> None:
        """Cluster-graph edges between deep nodes of long forest paths."""
        for x, y, data in sorted_edges(self.graph):
            if x in self.assigned or y in self.assigned:
                continue
            around_x = self._deep_window(x)
            around_y = self._deep_window(y) if around_x is not None else None
            if around_x is None or around_y is None:
                continue
            group = self._group(3, set(around_x) | set(around_y))
            path = self._witness(data)
            self.charges[x] += self.h._buy(path)
            group.extra |= path_pairs(path)

    def _group_diameter(self, group: _Group) -> float:
        if group.diameter is None:
            group.diameter = terminal_diameter(
                self.h.graph, self._group_edges(group), self._group_terminals(group)
            )
        return group.diameter

    def _attach(self, piece: t.FrozenSet[int], length: float) -> bool:
        candidates = sorted(
            (data["weight"], data["pair"], nbr)
            for node in piece
            for nbr, data in self.tree.adj[node].items()
            if nbr in self.assigned and data["weight"] <= self.ell
        )
        for weight, _, nbr in candidates:
            index = self.assigned[nbr]
            group = self.groups[index]
            if group.phase == 4:
                continue
            arm = weight + length
            bound = diameter_bound(self._group_diameter(group), group.arms + [arm])
            if bound > self.h.g * self.ell:
                continue
            group.members |= piece
            group.arms.append(arm)
            for node in piece:
                self.assigned[node] = index
            return True
        return False

    def phase_four(self) -> None:
        """Cut the rest of the forest; short leftovers join earlier clusters."""
        forest = nx.Graph()
        free = [node for node in sorted(self.tree.nodes) if node not in self.assigned]
        forest.add_nodes_from(free)
        for node in free:
            for nbr in self._free_neighbors(node):
                forest.add_edge(node, nbr, **self.tree[node][nbr])
        for piece in break_tree(forest, free, self.ell, self.diameters):
            length = effective_diameter(forest, piece, self.diameters)
            if length < self.ell and self._attach(piece, length):
                self.report.attached += 1
                continue
            self._group(4, piece)

    def _group_terminals(self, group: _Group) -> t.FrozenSet[Vertex]:
        return frozenset().union(
            *(self.h.clusters[node].terminals for node in group.members)
        )

    def _group_edges(self, group: _Group) -> t.Set[Pair]:
        edges = set(group.extra)
        for node in group.members:
            edges |= self.h.clusters[node].edges
            for nbr, data in self.tree.adj[node].items():
                if nbr in group.members:
                    edges |= self.h._tree_edge_pairs(*data["pair"])
        return edges

    def finish(self) -> t.Dict[int, Cluster]:
        clusters = {}
        for cid, group in enumerate(self.groups):
            edges = self._group_edges(group)
            terminals = self._group_terminals(group)
            clusters[cid] = Cluster(
                cid,
                self.level,
                group.phase,
                terminals,
                children=tuple(sorted(group.members)),
                edges=frozenset(edges),
                diameter=terminal_diameter(self.h.graph, edges, terminals),
            )
            self.report.clusters_by_phase[group.phase] += 1
        missing = set(self.tree.nodes) - set(self.assigned)
        if missing:
            raise InvariantViolation(
                f"Clusters {sorted(missing)} were not assigned at level {self.level}"
            )
        return clusters
