"""Spanner-oracle abstraction and sparsity measurement."""

import abc
import logging
import math
import threading
import typing as t
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from spanner_forge.config import check_open_interval, settings
from spanner_forge.exceptions import InputError
from spanner_forge.graph import Vertex, WeightedGraph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleQuery:
    """A query ``(T, l, eps)`` to a spanner oracle.

    Args:
        terminals: Non-empty terminal list without duplicates.
        scale: Positive distance scale ``l``.
        epsilon: Stretch parameter in ``(0, 1)``.

    Raises:
        InputError: If any field is out of range.
    """

    terminals: t.Tuple[Vertex, ...]
    scale: float
    epsilon: float

    def __post_init__(self):
        terminals = tuple(self.terminals)
        if not terminals:
            raise InputError("Oracle query needs at least one terminal")
        if len(set(terminals)) != len(terminals):
            raise InputError("Oracle query terminals contain duplicates")
        object.__setattr__(self, "terminals", terminals)
        object.__setattr__(
            self, "scale", check_open_interval(self.scale, 0, math.inf, "scale")
        )
        object.__setattr__(
            self, "epsilon", check_open_interval(self.epsilon, 0, 1, "epsilon")
        )

    @property
    def window(self) -> t.Tuple[float, float]:
        """Distance window ``[l/8, l]`` whose pairs must be preserved."""
        return self.scale / 8, self.scale


@dataclass(frozen=True)
class OracleStats:
    """Size statistics of one oracle answer."""

    weight: float
    edge_count: int
    terminal_count: int
    scale: float
    max_edge_length: float = 0.0

    @classmethod
    def from_output(cls, output: WeightedGraph, query: OracleQuery) -> "OracleStats":
        """Statistics of an oracle output for its query."""
        return cls(
            weight=output.total_weight,
            edge_count=output.number_of_edges(),
            terminal_count=len(query.terminals),
            scale=query.scale,
            max_edge_length=max((w for _, _, w in output.edges()), default=0.0),
        )

    @property
    def weak_ratio(self) -> float:
        """``weight / (|T| * l)``."""
        return self.weight / (self.terminal_count * self.scale)

    @property
    def strong_ratio(self) -> float:
        """``edges / |T|``."""
        return self.edge_count / self.terminal_count

    def satisfies_edge_bound(self, tolerance: t.Optional[float] = None) -> bool:
        """Whether ``weak_ratio <= 2 * strong_ratio * max_edge_length / l``."""
        tolerance = settings.resolve("tolerance", tolerance)
        bound = 2 * self.strong_ratio * (self.max_edge_length / self.scale)
        return self.weak_ratio <= bound * (1 + tolerance)

    def satisfies_weight_bound(self, tolerance: t.Optional[float] = None) -> bool:
        """Whether ``weak_ratio <= 2 * strong_ratio``."""
        tolerance = settings.resolve("tolerance", tolerance)
        return self.weak_ratio <= 2 * self.strong_ratio * (1 + tolerance)


@dataclass(frozen=True)
class SparsityReport:
    """Maxima of the sparsity ratios over a query batch."""

    weak_ratio: float
    strong_ratio: float
    per_query: t.List[OracleStats] = field(default_factory=list)

    def as_dict(self) -> t.Dict[str, t.Any]:
        """JSON-ready representation."""
        return {
            "weak_ratio": self.weak_ratio,
            "strong_ratio": self.strong_ratio,
            "queries": len(self.per_query),
        }


class SpannerOracle(abc.ABC):
    """Base class of all spanner oracles.

    Subclasses implement :meth:`_answer`. The template method :meth:`query`
    handles the single-terminal case, removes edges longer than ``2l`` and
    keeps thread-safe call statistics.
    """

    name: str = "oracle"

    def __init__(self):
        self._lock = threading.Lock()
        self._calls = 0
        self._max_weak_ratio = 0.0

    @property
    def calls(self) -> int:
        """Number of answered queries."""
        return self._calls

    @property
    def max_weak_ratio(self) -> float:
        """Largest weak ratio observed over all answered queries."""
        return self._max_weak_ratio

    @abc.abstractmethod
    def knows(self, vertex: Vertex) -> bool:
        """Whether ``vertex`` belongs to the oracle's underlying space."""

    @abc.abstractmethod
    def distance(self, a: Vertex, b: Vertex) -> float:
        """Distance between two elements of the underlying space."""

    @abc.abstractmethod
    def _answer(self, query: OracleQuery) -> WeightedGraph:
        """Answer a query with at least two terminals."""

    def query(self, query: OracleQuery) -> WeightedGraph:
        """Answer a spanner-oracle query.

        Args:
            query: Validated query.

        Returns:
            Graph on (at least) the query terminals with every edge of length
            at most ``2l``.

        Raises:
            InputError: If a terminal is unknown to the oracle.
        """
        for terminal in query.terminals:
            if not self.knows(terminal):
                raise InputError(f"Terminal {terminal!r} is unknown to {self.name}")
        if len(query.terminals) == 1:
            output = WeightedGraph(vertices=query.terminals)
        else:
            output = prune_long_edges(self._answer(query), 2 * query.scale)
            output = output.with_vertices(query.terminals)
        weak = OracleStats.from_output(output, query).weak_ratio
        with self._lock:
            self._calls += 1
            self._max_weak_ratio = max(self._max_weak_ratio, weak)
        logger.debug(
            "%s answered |T|=%d l=%g with %d edges",
            self.name,
            len(query.terminals),
            query.scale,
            output.number_of_edges(),
        )
        return output

    def __call__(
        self, terminals: t.Sequence[Vertex], scale: float, epsilon: float
    ) -> WeightedGraph:
        return self.query(OracleQuery(tuple(terminals), scale, epsilon))

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__} {self.name} calls={self._calls}>"


def prune_long_edges(graph: WeightedGraph, limit: float) -> WeightedGraph:
    """Drop edges longer than ``limit`` and vertices left isolated."""
    kept = [(u, v) for u, v, w in graph.edges() if w <= limit]
    return graph.edge_subgraph(kept)


def oracle_query(oracle: SpannerOracle, query: OracleQuery) -> WeightedGraph:
    """Answer ``query`` with ``oracle``."""
    return oracle.query(query)


def measure_sparsity(
    oracle: SpannerOracle,
    queries: t.Sequence[OracleQuery],
    threads: t.Optional[int] = None,
) -> SparsityReport:
    """Empirical weak and strong sparsity over a batch of queries.

    Args:
        oracle: Oracle to measure.
        queries: Non-empty query batch.
        threads: Worker threads. (default = ``settings.threads``)

    Raises:
        InputError: If the batch is empty.
    """
    if not queries:
        raise InputError("Sparsity measurement needs at least one query")
    threads = settings.resolve("threads", threads)
    with ThreadPoolExecutor(max_workers=min(threads, len(queries))) as pool:
        outputs = list(pool.map(oracle.query, queries))
    stats = [
        OracleStats.from_output(output, query)
        for output, query in zip(outputs, queries)
    ]
    return SparsityReport(
        weak_ratio=max(entry.weak_ratio for entry in stats),
        strong_ratio=max(entry.strong_ratio for entry in stats),
        per_query=stats,
    )
