"""Held-Karp bitmask dynamic program for subset TSP."""

import logging
import typing as t

import numpy as np

from spanner_forge.config import settings
from spanner_forge.exceptions import CapacityError
from spanner_forge.graph import Vertex, WeightedGraph, metric_completion

logger = logging.getLogger(__name__)


def held_karp_matrix(dist: np.ndarray) -> float:
    """Shortest Hamiltonian cycle of a complete metric given as a matrix.

    Cities ``1..k-1`` are subsets over the start city 0. A single city
    gives 0 and two cities give twice their distance.
    """
    dist = np.asarray(dist, dtype=float)
    k = dist.shape[0]
    if k <= 1:
        return 0.0
    m = k - 1
    inner = dist[1:, 1:]
    dp = np.full((1 << m, m), np.inf)
    for j in range(m):
        dp[1 << j, j] = dist[0, j + 1]
    for mask in range(1, 1 << m):
        if mask & (mask - 1) == 0:
            continue
        js = np.array([j for j in range(m) if mask >> j & 1])
        prevs = mask ^ (1 << js)
        dp[mask, js] = np.min(dp[prevs, :] + inner[:, js].T, axis=1)
    return float(np.min(dp[-1] + dist[0, 1:]))


def held_karp(
    graph: WeightedGraph,
    terminals: t.Iterable[Vertex],
    cap: t.Optional[int] = None,
) -> float:
    """Optimal closed walk through all terminals, via the metric completion.

    Args:
        graph: Host graph.
        terminals: Terminals to visit.
        cap: Largest accepted terminal count.
            (default = ``settings.held_karp_cap``)

    Raises:
        CapacityError: If there are more than ``cap`` terminals.
        InputError: On unknown or duplicate terminals.
        InfeasibleError: If the terminals are disconnected.
    """
    cap = settings.resolve("held_karp_cap", cap)
    terminals = tuple(sorted(set(terminals)))
    if len(terminals) > cap:
        raise CapacityError(
            f"Held-Karp refuses {len(terminals)} terminals (cap {cap}); raise "
            "held_karp_cap or use the tree-decomposition solver"
        )
    metric = metric_completion(graph, terminals)
    weight = held_karp_matrix(metric.dist)
    logger.debug("Held-Karp over %d terminals: %g", metric.k, weight)
    return weight
