"""Partition of the terminal-metric edges into scale classes and levels."""

import logging
import math
import typing as t
from collections import defaultdict
from dataclasses import dataclass, field

from spanner_forge.config import check_open_interval
from spanner_forge.graph import Edge, TerminalMetric, minimum_spanning_tree

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EdgeBuckets:
    """Edges of the terminal metric grouped by scale class and level.

    Level ``i`` of class ``j`` has the length scale
    ``l = 2^j * w0 / eps^(i + 1)`` and holds the edges of weight in
    ``(l / 2, l]``. Edges of weight at most ``w0 / eps`` are cheap and kept
    apart.

    Args:
        epsilon: Stretch parameter.
        k: Number of terminals.
        mst_weight: Weight of the minimum spanning tree of the metric.
        w0: Base weight ``w(MST) / k^2``.
        cheap: Edges added to the spanner directly.
        buckets: Edges per ``(j, i)``.
    """

    epsilon: float
    k: int
    mst_weight: float
    w0: float
    cheap: t.Tuple[Edge, ...]
    buckets: t.Dict[t.Tuple[int, int], t.Tuple[Edge, ...]] = field(repr=False)

    @property
    def class_count(self) -> int:
        """``J = ceil(log2(1 / eps))``."""
        return max(1, math.ceil(math.log2(1 / self.epsilon)))

    @property
    def level_bound(self) -> int:
        """``I = ceil(log_{1/eps} k^2) - 1``, the last level a metric can use."""
        if self.k < 2:
            return 0
        return max(0, math.ceil(math.log(self.k**2) / math.log(1 / self.epsilon)) - 1)

    @property
    def classes(self) -> t.List[int]:
        """Scale classes holding at least one edge."""
        return sorted({j for j, _ in self.buckets})

    def top_level(self, j: int) -> int:
        """Highest level with edges in class ``j`` (-1 if there is none)."""
        return max((i for jj, i in self.buckets if jj == j), default=-1)

    def edges(self, j: int, i: int) -> t.Tuple[Edge, ...]:
        """Edges of class ``j`` at level ``i``."""
        return self.buckets.get((j, i), ())

    def scale(self, j: int, i: int) -> float:
        """Length scale ``l_i`` of class ``j`` (``i = -1`` gives the base scale)."""
        return 2**j * self.w0 / self.epsilon ** (i + 1)

    def heavy_edges(self) -> t.List[Edge]:
        """All bucketed edges."""
        return sorted(
            (edge for edges in self.buckets.values() for edge in edges),
            key=lambda edge: (edge[2], edge[0], edge[1]),
        )

    def as_dict(self) -> t.Dict[str, t.Any]:
        """JSON-friendly summary."""
        return {
            "w0": self.w0,
            "cheap": len(self.cheap),
            "classes": self.classes,
            "buckets": {
                f"{j},{i}": len(edges) for (j, i), edges in sorted(self.buckets.items())
            },
        }


def locate(weight: float, w0: float, epsilon: float) -> t.Tuple[int, int]:
    """Class ``j`` and level ``i`` of a heavy edge of the given weight.

    The level satisfies ``w0 / eps^(i+1) < weight <= w0 / eps^(i+2)`` and the
    class is the smallest ``j >= 1`` with ``weight <= 2^j w0 / eps^(i+1)``.
    """
    level = 0
    while weight > w0 / epsilon ** (level + 2):
        level += 1
    scale_class = 1
    while 2**scale_class * w0 / epsilon ** (level + 1) < weight:
        scale_class += 1
    return scale_class, level


def bucket_edges(
    metric: TerminalMetric,
    epsilon: float,
    mst_weight: t.Optional[float] = None,
) -> EdgeBuckets:
    """Split the metric edges into cheap edges and ``(j, i)`` buckets.

    Args:
        metric: Terminal metric.
        epsilon: Stretch parameter in ``(0, 1)``.
        mst_weight: Weight of the metric's minimum spanning tree.
            (default = computed)
    """
    check_open_interval(epsilon, 0, 1, "epsilon")
    if mst_weight is None:
        mst_weight = sum(w for _, _, w in minimum_spanning_tree(metric))
    k = metric.k
    w0 = mst_weight / k**2 if k else 0.0
    cheap = []
    buckets: t.Dict[t.Tuple[int, int], t.List[Edge]] = defaultdict(list)
    for edge in metric.edges():
        if edge[2] <= w0 / epsilon:
            cheap.append(edge)
        else:
            buckets[locate(edge[2], w0, epsilon)].append(edge)
    result = EdgeBuckets(
        epsilon=epsilon,
        k=k,
        mst_weight=mst_weight,
        w0=w0,
        cheap=tuple(cheap),
        buckets={key: tuple(edges) for key, edges in sorted(buckets.items())},
    )
    logger.debug(
        "Bucketed %d edges (%d cheap) into %d buckets",
        len(metric.edges()),
        len(cheap),
        len(result.buckets),
    )
    return result
