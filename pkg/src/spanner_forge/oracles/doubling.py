"""Net-based spanner oracles for doubling and correlation-dimension metrics."""

import logging
import typing as t

from spanner_forge.config import settings
from spanner_forge.graph import Vertex, WeightedGraph
from spanner_forge.oracles.base import OracleQuery, SpannerOracle
from spanner_forge.oracles.points import PointSet, r_net

logger = logging.getLogger(__name__)


class DoublingOracle(SpannerOracle):
    """Spanner oracle for metrics of bounded doubling dimension.

    The query terminals are thinned to an ``eps * l / net_divisor``-net. Net
    points at distance in ``[l / band_divisor, 2l]`` are joined directly and
    every other terminal is attached to its nearest net point.

    Args:
        space: Point set (coordinates or distance matrix).
        net_divisor: Net radius divisor. (default = ``settings.net_divisor``)
        band_divisor: Lower band divisor.
            (default = ``settings.band_divisor``)
    """

    name = "doubling"

    def __init__(
        self,
        space: PointSet,
        net_divisor: t.Optional[float] = None,
        band_divisor: t.Optional[float] = None,
    ):
        super().__init__()
        self._space = space
        self._net_divisor = net_divisor
        self._band_divisor = band_divisor

    @classmethod
    def from_graph(cls, graph: WeightedGraph) -> "DoublingOracle":
        """Oracle over the shortest-path metric of a connected graph."""
        return cls(PointSet.from_graph(graph))

    @property
    def space(self) -> PointSet:
        """Underlying point set."""
        return self._space

    def knows(self, vertex: Vertex) -> bool:
        """Whether the label is a point of the space."""
        return vertex in self._space

    def distance(self, a: Vertex, b: Vertex) -> float:
        """Metric distance between two points."""
        return self._space.distance(a, b)

    def _answer(self, query: OracleQuery) -> WeightedGraph:
        net_divisor = settings.resolve("net_divisor", self._net_divisor)
        band_divisor = settings.resolve("band_divisor", self._band_divisor)
        scale = query.scale
        terminals = query.terminals
        matrix = self._space.distances(terminals)
        position = {label: i for i, label in enumerate(terminals)}
        net = r_net(self._space, terminals, query.epsilon * scale / net_divisor)
        net_rows = [position[label] for label in net]
        band: t.Dict[int, t.List[t.Tuple[int, float]]] = {i: [] for i in net_rows}
        edges = []
        for a_index, i in enumerate(net_rows):
            for j in net_rows[a_index + 1 :]:
                length = float(matrix[i, j])
                if scale / band_divisor <= length <= 2 * scale:
                    edges.append((terminals[i], terminals[j], length))
                    band[i].append((j, length))
                    band[j].append((i, length))
        in_net = set(net_rows)
        for i in range(len(terminals)):
            if i in in_net:
                continue
            nearest = min(net_rows, key=lambda j: (matrix[i, j], terminals[j]))
            length = float(matrix[i, nearest])
            if length > 0:
                edges.append((terminals[i], terminals[nearest], length))
            else:
                # coincident with its net point: copy the net point's band edges
                edges.extend(
                    (terminals[i], terminals[j], weight)
                    for j, weight in band[nearest]
                )
        logger.debug(
            "%s: %d of %d terminals in the net", self.name, len(net), len(terminals)
        )
        return WeightedGraph(edges, terminals)


class CorrelationOracle(DoublingOracle):
    """Spanner oracle for metrics of bounded correlation dimension.

    The construction is the one of :class:`DoublingOracle`; only the
    sparsity guarantee differs, which is measured rather than asserted.
    """

    name = "correlation"
