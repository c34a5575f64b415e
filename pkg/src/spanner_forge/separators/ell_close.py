"""Recursive spanner for close terminal pairs over shortest-path separators."""

import logging
import math
import typing as t
from dataclasses import dataclass, field

from spanner_forge.config import check_open_interval, settings
from spanner_forge.exceptions import (
    InputError,
    InvariantViolation,
    SeparatorImbalanceError,
)
from spanner_forge.graph import (
    Vertex,
    WeightedGraph,
    is_shortest_path,
    ordered,
    within_tolerance,
)
from spanner_forge.separators.path_to_path import ptp_spanner
from spanner_forge.separators.providers import (
    SeparatorFamily,
    SeparatorProvider,
    default_provider,
)

logger = logging.getLogger(__name__)

Path = t.Tuple[Vertex, ...]

# demands re-checked for shortestness in every residual graph
_RESIDUAL_SAMPLE = 3


@dataclass
class EllCloseStats:
    """Diagnostics collected by :func:`ell_close_spanner`.

    Args:
        calls: Number of separated subgraphs.
        max_depth: Deepest recursion level reached.
        balances: ``(subgraph size, largest remaining component)`` per call.
        separator_sizes: Number of separator vertices per call.
    """

    calls: int = 0
    max_depth: int = 0
    balances: t.List[t.Tuple[int, int]] = field(default_factory=list)
    separator_sizes: t.List[int] = field(default_factory=list)

    def record(self, depth: int, family: SeparatorFamily) -> None:
        """Account for one separated subgraph."""
        self.calls += 1
        self.max_depth = max(self.max_depth, depth)
        self.balances.append((family.size, family.largest_component))
        self.separator_sizes.append(len(family.vertices))

    @property
    def worst_balance(self) -> float:
        """Largest ``component / size`` ratio over all calls."""
        return max((part / size for size, part in self.balances), default=0.0)

    def as_dict(self) -> t.Dict[str, t.Any]:
        """JSON-friendly summary."""
        return {
            "calls": self.calls,
            "max_depth": self.max_depth,
            "worst_balance": self.worst_balance,
            "separator_vertices": sum(self.separator_sizes),
        }


def split_demands_at_terminals(
    demand_paths: t.Iterable[t.Sequence[Vertex]], terminals: t.Iterable[Vertex]
) -> t.List[Path]:
    """Cut demand paths at interior terminals.

    Every piece is again a shortest path between two terminals when the input
    paths are. Single-vertex pieces are dropped and only the first piece per
    endpoint pair is kept.
    """
    terminals = set(terminals)
    seen: t.Set[t.Tuple[Vertex, Vertex]] = set()
    pieces: t.List[Path] = []
    for demand in demand_paths:
        start = 0
        for index in range(1, len(demand)):
            if demand[index] in terminals or index == len(demand) - 1:
                piece = tuple(demand[start : index + 1])
                start = index
                key = ordered(piece[0], piece[-1])
                if len(piece) > 1 and key not in seen:
                    seen.add(key)
                    pieces.append(piece)
    return pieces


def _crosses(demand: Path, vertices: t.Set[Vertex]) -> bool:
    return any(v in vertices for v in demand)


class _EllClose:
    def __init__(
        self,
        ell: float,
        epsilon: float,
        provider: SeparatorProvider,
        depth_cap: int,
        stats: EllCloseStats,
    ):
        self.ell = ell
        self.epsilon = epsilon
        self.provider = provider
        self.depth_cap = depth_cap
        self.stats = stats
        self.edges: t.Set[t.Tuple[Vertex, Vertex]] = set()

    def descend(
        self,
        graph: WeightedGraph,
        terminals: t.Sequence[Vertex],
        demands: t.Sequence[Path],
        depth: int,
    ) -> None:
        for component in graph.connected_components():
            members = set(component)
            local = [q for q in demands if q[0] in members]
            if not local:
                continue
            part = graph.subgraph(component)
            for demand in local[:_RESIDUAL_SAMPLE]:
                if not is_shortest_path(part, demand):
                    raise InvariantViolation(
                        f"Demand path {list(demand)} is no longer shortest "
                        f"at depth {depth}"
                    )
            self.separate(
                part, [v for v in terminals if v in members], local, depth
            )

    def separate(
        self,
        graph: WeightedGraph,
        terminals: t.Sequence[Vertex],
        demands: t.Sequence[Path],
        depth: int,
    ) -> None:
        if len(terminals) <= 1:
            return
        if depth > self.depth_cap:
            raise SeparatorImbalanceError(
                f"Separator recursion exceeded depth {self.depth_cap}",
                balances=self.stats.balances,
                depth=depth,
            )
        family = self.provider(graph)
        self.stats.record(depth, family)
        removed: t.Set[Vertex] = set()
        pending = list(demands)
        for paths in family.path_sets:
            cut = {v for path in paths for v in path}
            crossing = [q for q in pending if _crosses(q, cut)]
            if crossing:
                residual = graph.without_vertices(removed) if removed else graph
                spanner = ptp_spanner(
                    residual, paths, crossing, self.ell, self.epsilon
                )
                self.edges.update(ordered(u, v) for u, v, _ in spanner.edges())
                pending = [q for q in pending if not _crosses(q, cut)]
            removed.update(cut)
        if pending:
            self.descend(graph.without_vertices(removed), terminals, pending, depth + 1)


def ell_close_spanner(
    graph: WeightedGraph,
    terminals: t.Sequence[Vertex],
    demand_paths: t.Sequence[t.Sequence[Vertex]],
    ell: float,
    epsilon: float,
    separator_provider: t.Optional[SeparatorProvider] = None,
    depth_factor: t.Optional[float] = None,
    stats: t.Optional[EllCloseStats] = None,
) -> WeightedGraph:
    """Spanner preserving the distances prescribed by short demand paths.

    Every separator level serves the demands crossing its paths with a
    path-to-path spanner on the graph without earlier levels; the remaining
    demands are handled recursively inside the components left after
    removing all separator vertices.

    Args:
        graph: Host graph.
        terminals: Terminal vertices.
        demand_paths: Shortest paths of weight at most ``ell`` between
            terminals without interior terminals.
        ell: Length scale.
        epsilon: Stretch parameter in ``(0, 1)``.
        separator_provider: Separator provider.
            (default = centroid for trees, shortest-path tree otherwise)
        depth_factor: Depth cap as a multiple of ``log2 n``.
            (default = ``settings.depth_factor``)
        stats: Collector for recursion diagnostics.

    Returns:
        Subgraph of ``graph`` over the terminals and the kept edges.

    Raises:
        InputError: If a demand path does not run between terminals, passes
            an interior terminal or is longer than ``ell``.
        SeparatorImbalanceError: If the recursion exceeds the depth cap.
    """
    check_open_interval(epsilon, 0, 1, "epsilon")
    if not ell > 0:
        raise InputError(f"l must be positive, got {ell}")
    terminals = tuple(terminals)
    for terminal in terminals:
        graph.require_vertex(terminal)
    members = set(terminals)
    demands = []
    for index, demand in enumerate(demand_paths):
        demand = tuple(demand)
        if len(demand) < 2 or demand[0] not in members or demand[-1] not in members:
            raise InputError(f"Demand path {index} does not join two terminals")
        if any(v in members for v in demand[1:-1]):
            raise InputError(f"Demand path {index} passes an interior terminal")
        length = graph.path_weight(demand)
        if not within_tolerance(length, ell):
            raise InputError(f"Demand path {index} has weight {length} > l = {ell}")
        demands.append(demand)
    depth_factor = settings.resolve("depth_factor", depth_factor)
    depth_cap = max(1, math.ceil(depth_factor * math.log2(max(len(graph), 2))))
    stats = EllCloseStats() if stats is None else stats
    provider = separator_provider or default_provider(graph)
    run = _EllClose(ell, epsilon, provider, depth_cap, stats)
    if len(terminals) > 1:
        run.descend(graph, terminals, demands, 0)
    result = graph.edge_subgraph(sorted(run.edges), terminals)
    logger.debug(
        "Close-pair spanner for %d demands: weight %s after %d separations",
        len(demands),
        result.total_weight,
        stats.calls,
    )
    return result
