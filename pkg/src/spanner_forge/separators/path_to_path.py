"""Path-to-path spanners for short demand paths crossing shortest paths."""

import logging
import typing as t
from collections import defaultdict

from spanner_forge.config import check_open_interval
from spanner_forge.exceptions import ContractViolation, InputError
from spanner_forge.graph import (
    Vertex,
    WeightedGraph,
    is_shortest_path,
    ordered,
    within_tolerance,
)
from spanner_forge.separators.anchored import (
    Path,
    orient_path,
    path_offsets,
    ss_spanner,
)

logger = logging.getLogger(__name__)


def split_at_long_edges(
    graph: WeightedGraph, path: t.Sequence[Vertex], limit: float
) -> t.List[Path]:
    """Maximal subpaths of ``path`` whose edges all weigh at most ``limit``."""
    segments: t.List[t.List[Vertex]] = [[path[0]]]
    for a, b in zip(path, path[1:]):
        if graph.weight(a, b) > limit:
            segments.append([b])
        else:
            segments[-1].append(b)
    return [tuple(segment) for segment in segments]


def _validate_demands(
    graph: WeightedGraph,
    base_path: t.Sequence[Vertex],
    demand_paths: t.Sequence[t.Sequence[Vertex]],
    ell: float,
) -> None:
    on_path = set(base_path)
    for index, demand in enumerate(demand_paths):
        if not demand:
            raise InputError(f"Demand path {index} is empty")
        if not on_path.intersection(demand):
            raise InputError(f"Demand path {index} does not cross the base path")
        try:
            weight = graph.path_weight(demand)
        except InputError as error:
            raise InputError(f"Demand path {index}: {error}") from error
        if not within_tolerance(weight, ell):
            raise InputError(f"Demand path {index} weighs {weight} > l = {ell}")


def ptp_single(
    graph: WeightedGraph,
    base_path: t.Sequence[Vertex],
    demand_paths: t.Sequence[t.Sequence[Vertex]],
    ell: float,
    epsilon: float,
    validate: bool = True,
) -> WeightedGraph:
    """Spanner for demand paths of weight at most ``l`` crossing one path.

    Edges heavier than ``l`` are ignored and the base path is split at them.
    Every demand endpoint gets a single-source spanner towards the segment
    its demands cross, plus the piece of that segment within ``4 l / eps`` of
    its closest vertex. Each demand pair keeps its distance within
    ``1 + O(eps)``.

    Args:
        graph: Host graph.
        base_path: Shortest path of ``graph``.
        demand_paths: Shortest paths of weight at most ``ell`` meeting the
            base path.
        ell: Length scale.
        epsilon: Stretch parameter in ``(0, 1)``.
        validate: Verify the base path and the demands.

    Returns:
        Subgraph of ``graph`` containing all demand endpoints; empty for no
        demands.

    Raises:
        InputError: Naming the offending demand path.
        ContractViolation: If ``base_path`` is not a shortest path.
    """
    check_open_interval(epsilon, 0, 1, "epsilon")
    if not ell > 0:
        raise InputError(f"l must be positive, got {ell}")
    if not demand_paths:
        return WeightedGraph()
    if validate:
        if not is_shortest_path(graph, base_path):
            raise ContractViolation(
                f"Base path {list(base_path)} is not a shortest path"
            )
        _validate_demands(graph, base_path, demand_paths, ell)
    short = graph.edges_at_most(ell)
    segments = split_at_long_edges(graph, orient_path(base_path), ell)
    segment_of = {v: i for i, segment in enumerate(segments) for v in segment}
    wanted: t.Dict[Vertex, t.Set[int]] = defaultdict(set)
    for demand in demand_paths:
        crossing = next(v for v in demand if v in segment_of)
        for endpoint in (demand[0], demand[-1]):
            wanted[endpoint].add(segment_of[crossing])
    reach = 4 * ell / epsilon
    edges: t.Set[t.Tuple[Vertex, Vertex]] = set()
    for endpoint in sorted(wanted):
        for index in sorted(wanted[endpoint]):
            segment = segments[index]
            anchored = ss_spanner(short, segment, endpoint, epsilon, validate=False)
            edges.update(anchored.edges())
            edges.update(_piece_around(graph, anchored.base_path, anchored.y0, reach))
    logger.debug(
        "Path of %d vertices serves %d demands from %d endpoints",
        len(base_path),
        len(demand_paths),
        len(wanted),
    )
    return graph.edge_subgraph(sorted(edges), sorted(wanted))


def _piece_around(
    graph: WeightedGraph, path: Path, center: Vertex, reach: float
) -> t.Set[t.Tuple[Vertex, Vertex]]:
    offsets = path_offsets(graph, path)
    origin = offsets[path.index(center)]
    inside = [i for i, x in enumerate(offsets) if abs(x - origin) <= reach]
    first, last = inside[0], inside[-1]
    piece = path[first : last + 1]
    return {ordered(a, b) for a, b in zip(piece, piece[1:])}


def first_crossed(
    base_paths: t.Sequence[t.Sequence[Vertex]], demand: t.Sequence[Vertex]
) -> t.Optional[int]:
    """Index of the first base path sharing a vertex with ``demand``."""
    vertices = set(demand)
    for index, path in enumerate(base_paths):
        if vertices.intersection(path):
            return index
    return None


def ptp_spanner(
    graph: WeightedGraph,
    base_paths: t.Sequence[t.Sequence[Vertex]],
    demand_paths: t.Sequence[t.Sequence[Vertex]],
    ell: float,
    epsilon: float,
) -> WeightedGraph:
    """Path-to-path spanner for several base paths.

    Every demand path is served by the first base path it crosses.

    Raises:
        InputError: If a demand crosses none of the base paths.
    """
    groups: t.Dict[int, t.List[t.Sequence[Vertex]]] = defaultdict(list)
    for index, demand in enumerate(demand_paths):
        owner = first_crossed(base_paths, demand)
        if owner is None:
            raise InputError(f"Demand path {index} crosses no base path")
        groups[owner].append(demand)
    result = WeightedGraph()
    for owner in sorted(groups):
        result = result.union(
            ptp_single(graph, base_paths[owner], groups[owner], ell, epsilon)
        )
    return result


def ptp_weight_bound(ell: float, epsilon: float, endpoints: int) -> float:
    """Weight guarantee ``(8 eps^-2 + 8 eps^-1 + 2) l`` per demand endpoint."""
    return (8 / epsilon**2 + 8 / epsilon + 2) * ell * endpoints

