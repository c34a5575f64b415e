"""Seeded instance families.

Every family draws from a PCG64 generator seeded with the instance seed, so
the same :class:`InstanceSpec` always yields the same bytes.
"""

import json
import logging
import math
import typing as t
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

from spanner_forge.exceptions import InputError
from spanner_forge.graph import (
    GraphInstance,
    WeightedGraph,
    graph_to_dict,
    kruskal,
)
from spanner_forge.oracles import PointSet

logger = logging.getLogger(__name__)

TERMINAL_RULES = ("random", "all", "spread")


@dataclass(frozen=True)
class InstanceSpec:
    """Description of a generated instance.

    Args:
        family: Family name, see :data:`GENERATOR_BY_NAME`.
        size: Family size parameters (e.g. ``{"rows": 3, "cols": 3}``).
        seed: Seed of the PCG64 generator.
        terminals: Number of terminals (None: all vertices).
        rule: Terminal selection: ``random``, ``all`` or ``spread``
            (evenly spaced ids).
    """

    family: str
    size: t.Mapping[str, t.Any] = field(default_factory=dict)
    seed: int = 0
    terminals: t.Optional[int] = None
    rule: str = "random"

    def rng(self) -> np.random.Generator:
        """Fresh generator for this spec."""
        return np.random.Generator(np.random.PCG64(self.seed))

    def as_dict(self) -> t.Dict[str, t.Any]:
        """JSON-friendly form."""
        return {
            "family": self.family,
            "size": dict(self.size),
            "seed": self.seed,
            "terminals": self.terminals,
            "rule": self.rule,
        }


@dataclass(frozen=True)
class GeneratedInstance:
    """Output of :func:`generate`: a graph instance or a point set."""

    spec: InstanceSpec
    instance: t.Optional[GraphInstance] = None
    points: t.Optional[PointSet] = None

    def dumps(self) -> str:
        """File content: graph JSON or point CSV."""
        if self.points is not None:
            return self.points.to_csv()
        return json.dumps(graph_to_dict(self.instance.graph, self.instance.terminals))

    def write(self, path: t.Union[str, Path]) -> None:
        """Write :meth:`dumps` to ``path``."""
        text = self.dumps()
        Path(path).write_text(
            text if text.endswith("\n") else text + "\n", encoding="utf-8"
        )

    @property
    def graph_instance(self) -> GraphInstance:
        """Graph form; point sets become complete graphs over all points."""
        if self.instance is not None:
            return self.instance
        graph = self.points.complete_graph()
        return GraphInstance(graph, graph.vertices)


def _require(size: t.Mapping[str, t.Any], name: str, minimum: int = 1) -> int:
    try:
        value = int(size[name])
    except KeyError as error:
        raise InputError(f"Missing size parameter {name!r}") from error
    except (TypeError, ValueError) as error:
        raise InputError(f"Size parameter {name!r} must be an integer") from error
    if value < minimum:
        raise InputError(f"Size parameter {name!r} must be at least {minimum}")
    return value


def grid_graph(rows: int, cols: int, weights: t.Optional[np.ndarray] = None):
    """Grid with row-major ids; ``weights`` (one per edge) default to 1."""
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    if weights is None:
        weights = np.ones(len(edges))
    return WeightedGraph(
        ((u, v, float(w)) for (u, v), w in zip(edges, weights)), range(rows * cols)
    )


def grid(size: t.Mapping[str, t.Any], rng: np.random.Generator) -> WeightedGraph:
    """Unit-weight grid of ``rows x cols`` vertices."""
    return grid_graph(_require(size, "rows"), _require(size, "cols"))


def doubling_grid(
    size: t.Mapping[str, t.Any], rng: np.random.Generator
) -> WeightedGraph:
    """Grid whose edge weights are drawn from ``[1, 2)``."""
    rows, cols = _require(size, "rows"), _require(size, "cols")
    count = rows * (cols - 1) + cols * (rows - 1)
    return grid_graph(rows, cols, 1 + rng.random(count))


def random_geometric(
    size: t.Mapping[str, t.Any], rng: np.random.Generator
) -> WeightedGraph:
    """Points in the unit square joined within ``radius``, plus their MST."""
    n = _require(size, "n")
    radius = float(size.get("radius", 1.5 / math.sqrt(n)))
    points = rng.random((n, 2))
    diff = points[:, None, :] - points[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=-1))
    pairs = [(i, j, float(dist[i, j])) for i, j in combinations(range(n), 2)]
    chosen = {(i, j): w for i, j, w in pairs if 0 < w <= radius}
    for i, j, w in kruskal(range(n), (pair for pair in pairs if pair[2] > 0)):
        chosen[i, j] = w
    return WeightedGraph(
        ((i, j, w) for (i, j), w in sorted(chosen.items())), range(n)
    )


def random_tree(size: t.Mapping[str, t.Any], rng: np.random.Generator) -> WeightedGraph:
    """Random recursive tree with weights drawn from ``[1, 10)``."""
    n = _require(size, "n")
    edges = [
        (int(rng.integers(v)), v, float(1 + 9 * rng.random())) for v in range(1, n)
    ]
    return WeightedGraph(edges, range(n))


def path_plus_clique(
    size: t.Mapping[str, t.Any], rng: np.random.Generator
) -> WeightedGraph:
    """Unit path on ``n`` vertices with a unit clique on its first ``ceil(sqrt(n))``."""
    n = _require(size, "n")
    clique = math.ceil(math.sqrt(n))
    edges = {(v, v + 1) for v in range(n - 1)}
    edges.update(combinations(range(clique), 2))
    return WeightedGraph(((u, v, 1.0) for u, v in sorted(edges)), range(n))


def euclidean_points(
    size: t.Mapping[str, t.Any], rng: np.random.Generator
) -> PointSet:
    """Uniform points in the unit cube of dimension ``dim`` (default 2)."""
    n = _require(size, "n")
    dim = _require(size, "dim", 1) if "dim" in size else 2
    return PointSet(coordinates=rng.random((n, dim)))


GENERATOR_BY_NAME: t.Dict[str, t.Callable[..., t.Any]] = {
    "grid": grid,
    "random-geometric": random_geometric,
    "tree": random_tree,
    "euclidean-points": euclidean_points,
    "doubling-grid": doubling_grid,
    "path-plus-clique": path_plus_clique,
}


def select_terminals(
    vertices: t.Sequence[int],
    count: t.Optional[int],
    rule: str,
    rng: np.random.Generator,
) -> t.Tuple[int, ...]:
    """Pick terminals by rule.

    Raises:
        InputError: On an unknown rule or a count above the vertex count.
    """
    if rule not in TERMINAL_RULES:
        raise InputError(f"Unknown terminal rule {rule!r}; use one of {TERMINAL_RULES}")
    if count is None or rule == "all":
        return tuple(vertices)
    if not 0 <= count <= len(vertices):
        raise InputError(
            f"Cannot pick {count} terminals among {len(vertices)} vertices"
        )
    if rule == "spread":
        if count == 0:
            return ()
        step = len(vertices) / count
        return tuple(vertices[int(i * step)] for i in range(count))
    chosen = rng.choice(len(vertices), size=count, replace=False)
    return tuple(sorted(vertices[i] for i in chosen))


def generate(spec: InstanceSpec) -> GeneratedInstance:
    """Build the instance described by ``spec``.

    Raises:
        InputError: On an unknown family or invalid parameters.
    """
    try:
        generator = GENERATOR_BY_NAME[spec.family]
    except KeyError as error:
        raise InputError(
            f"Unknown family {spec.family!r}; use one of {sorted(GENERATOR_BY_NAME)}"
        ) from error
    rng = spec.rng()
    product = generator(spec.size, rng)
    if isinstance(product, PointSet):
        logger.debug("Generated %d %s points", len(product), spec.family)
        return GeneratedInstance(spec, points=product)
    terminals = select_terminals(product.vertices, spec.terminals, spec.rule, rng)
    logger.debug(
        "Generated %s: %d vertices, %d edges, %d terminals",
        spec.family,
        len(product),
        product.number_of_edges(),
        len(terminals),
    )
    return GeneratedInstance(spec, GraphInstance(product, terminals))
