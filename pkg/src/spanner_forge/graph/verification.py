"""Independent stretch and lightness checks for produced subgraphs."""

import logging
import math
import typing as t
from dataclasses import dataclass, field

from spanner_forge.config import settings
from spanner_forge.exceptions import (
    DegenerateInputError,
    InfeasibleError,
    InputError,
    InvariantViolation,
)
from spanner_forge.graph.paths import dijkstra, within_tolerance
from spanner_forge.graph.weighted_graph import Vertex, WeightedGraph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PairStretch:
    """Stretch of a single terminal pair."""

    pair: t.Tuple[Vertex, Vertex]
    graph_distance: float
    spanner_distance: float
    ratio: float


@dataclass(frozen=True)
class StretchReport:
    """Outcome of :func:`verify_stretch`.

    Args:
        bound: Stretch bound the spanner was checked against.
        max_stretch: Largest ratio over all pairs (1.0 without pairs).
        worst_pair: Pair attaining ``max_stretch``.
        per_pair: One entry per terminal pair.
        violations: Pairs whose ratio exceeds the bound.
    """

    bound: float
    max_stretch: float
    worst_pair: t.Optional[t.Tuple[Vertex, Vertex]]
    per_pair: t.List[PairStretch] = field(default_factory=list)
    violations: t.List[t.Tuple[Vertex, Vertex]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """Whether no pair violates the bound."""
        return not self.violations

    def as_dict(self, pairs: bool = True) -> t.Dict[str, t.Any]:
        """JSON-ready representation."""
        result: t.Dict[str, t.Any] = {
            "bound": self.bound,
            "max_stretch": self.max_stretch,
            "worst_pair": list(self.worst_pair) if self.worst_pair else None,
            "passed": self.passed,
            "violations": [list(pair) for pair in self.violations],
        }
        if pairs:
            result["per_pair"] = [
                {
                    "pair": list(entry.pair),
                    "d_graph": entry.graph_distance,
                    "d_spanner": entry.spanner_distance,
                    "ratio": entry.ratio,
                }
                for entry in self.per_pair
            ]
        return result


def verify_stretch(
    spanner: WeightedGraph,
    graph: WeightedGraph,
    terminals: t.Iterable[Vertex],
    bound: float,
    tolerance: t.Optional[float] = None,
) -> StretchReport:
    """Compare terminal distances in a subgraph against the full graph.

    Args:
        spanner: Candidate subgraph.
        graph: Host graph.
        terminals: Terminals whose pairwise distances are compared.
        bound: Allowed stretch.
        tolerance: Relative tolerance of the comparison.
            (default = ``settings.tolerance``)

    Returns:
        Report over all terminal pairs. A terminal pair unreachable in the
        spanner has ratio ``inf``.

    Raises:
        InputError: If ``spanner`` is not a subgraph of ``graph`` or a
            terminal is unknown.
        InfeasibleError: If a terminal pair is disconnected in ``graph``.
        InvariantViolation: If the spanner is shorter than the graph.
    """
    tolerance = settings.resolve("tolerance", tolerance)
    if not spanner.is_subgraph_of(graph):
        raise InputError("The spanner is not a subgraph of the graph")
    terminals = tuple(terminals)
    for terminal in terminals:
        graph.require_vertex(terminal)
    per_pair: t.List[PairStretch] = []
    violations = []
    worst: t.Optional[t.Tuple[Vertex, Vertex]] = None
    max_stretch = 1.0
    for i, source in enumerate(terminals):
        in_graph, _ = dijkstra(graph.adjacency.__getitem__, source)
        if source in spanner:
            in_spanner, _ = dijkstra(spanner.adjacency.__getitem__, source)
        else:
            in_spanner = {}
        for target in terminals[i + 1 :]:
            d_graph = in_graph.get(target, math.inf)
            if math.isinf(d_graph):
                raise InfeasibleError(
                    f"Terminals {source!r} and {target!r} are disconnected",
                    pair=(source, target),
                )
            d_spanner = in_spanner.get(target, math.inf)
            if d_spanner < d_graph * (1 - tolerance):
                raise InvariantViolation(
                    f"Subgraph distance {d_spanner} below graph distance {d_graph} "
                    f"for pair {(source, target)}"
                )
            ratio = d_spanner / d_graph
            per_pair.append(PairStretch((source, target), d_graph, d_spanner, ratio))
            if worst is None or ratio > max_stretch:
                worst, max_stretch = (source, target), max(ratio, 1.0)
            if not within_tolerance(d_spanner, bound * d_graph, tolerance):
                violations.append((source, target))
    if violations:
        logger.info(
            "%d of %d pairs exceed stretch %g", len(violations), len(per_pair), bound
        )
    return StretchReport(bound, max_stretch, worst, per_pair, violations)


def pairwise_stretch(
    spanner: WeightedGraph,
    graph: WeightedGraph,
    pairs: t.Iterable[t.Tuple[Vertex, Vertex]],
) -> t.Dict[t.Tuple[Vertex, Vertex], float]:
    """Stretch ``d_spanner / d_graph`` for explicit vertex pairs."""
    result = {}
    cache: t.Dict[Vertex, t.Tuple[t.Dict, t.Dict]] = {}
    for a, b in pairs:
        if a not in cache:
            cache[a] = (
                dijkstra(graph.adjacency.__getitem__, a)[0],
                dijkstra(spanner.adjacency.__getitem__, a)[0] if a in spanner else {},
            )
        in_graph, in_spanner = cache[a]
        result[a, b] = in_spanner.get(b, math.inf) / in_graph[b]
    return result


def measure_lightness(spanner: WeightedGraph, baseline_tree: WeightedGraph) -> float:
    """Weight of ``spanner`` relative to a baseline tree.

    Raises:
        DegenerateInputError: If the baseline has zero weight.
    """
    baseline = baseline_tree.total_weight
    if baseline <= 0:
        raise DegenerateInputError("Lightness baseline has zero weight")
    return spanner.total_weight / baseline


__all__ = [
    "PairStretch",
    "StretchReport",
    "measure_lightness",
    "pairwise_stretch",
    "verify_stretch",
]
