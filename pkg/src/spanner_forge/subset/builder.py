"""Light subset spanners from a spanner oracle."""

import logging
import typing as t
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from spanner_forge.config import check_open_interval, settings
from spanner_forge.exceptions import InvariantViolation
from spanner_forge.graph import (
    GraphBuilder,
    TerminalMetric,
    Vertex,
    WeightedGraph,
    metric_completion,
    minimum_spanning_tree,
    verify_stretch,
)
from spanner_forge.oracles import OracleQuery, SpannerOracle, measure_sparsity
from spanner_forge.subset.buckets import EdgeBuckets, bucket_edges
from spanner_forge.subset.hierarchy import ClusterHierarchy, safety_factor

logger = logging.getLogger(__name__)


@dataclass
class SubsetSpannerResult:
    """Spanner together with the run diagnostics.

    Args:
        spanner: Subgraph of the input graph.
        diagnostics: JSON-friendly run statistics.
        hierarchies: Cluster hierarchy of every scale class.
    """

    spanner: WeightedGraph
    diagnostics: t.Dict[str, t.Any]
    hierarchies: t.Dict[int, ClusterHierarchy] = field(default_factory=dict, repr=False)


def credit_rate(
    epsilon: float, weak_sparsity: float, g: int, safety: float = 1.0
) -> float:
    """Credit per unit weight ``c = a * max(Ws / eps^2, g / eps^3)``."""
    return safety * max(weak_sparsity / epsilon**2, g / epsilon**3)


def calibration_queries(
    metric: TerminalMetric,
    buckets: EdgeBuckets,
    epsilon: float,
    count: int,
    seed: int = 0,
) -> t.List[OracleQuery]:
    """Random oracle queries at the scales the construction will use.

    Args:
        metric: Terminal metric.
        buckets: Level buckets of the metric.
        epsilon: Stretch parameter.
        count: Number of queries.
        seed: Seed of the PCG64 generator.
    """
    scales = sorted({2 * buckets.scale(j, i) for j, i in buckets.buckets})
    if not scales or metric.k < 2:
        return []
    rng = np.random.Generator(np.random.PCG64(seed))
    queries = []
    for _ in range(count):
        size = int(rng.integers(2, metric.k + 1))
        chosen = rng.choice(metric.k, size=size, replace=False)
        terminals = tuple(metric.terminals[index] for index in sorted(chosen))
        scale = scales[int(rng.integers(len(scales)))]
        queries.append(OracleQuery(terminals, scale, epsilon))
    return queries


def build_subset_spanner(
    graph: WeightedGraph,
    terminals: t.Iterable[Vertex],
    oracle: SpannerOracle,
    epsilon: float,
    *,
    rescale: bool = False,
    g: t.Optional[int] = None,
    credit_safety: t.Optional[float] = None,
    degree_threshold: t.Optional[int] = None,
    threads: t.Optional[int] = None,
    calibration: t.Optional[int] = None,
    seed: int = 0,
) -> SubsetSpannerResult:
    """Build a light subset spanner of ``graph`` using a spanner oracle.

    Every terminal pair ends up within stretch ``1 + s * eps`` with
    ``s = 16g + 1``. With ``rescale`` set, ``epsilon`` is the target stretch
    excess and is divided by ``s`` before the construction.

    The cluster invariants are only guaranteed for ``eps < 1/s``. A value in
    ``[1/s, 1/g)`` is accepted with a warning; the stretch bound then rests
    on deferred credit and the per-level safety net, whose use is reported
    as ``deferred_credit``, ``credit_topups`` and ``repairs``.

    Args:
        graph: Host graph.
        terminals: Terminal vertices (connected in ``graph``).
        oracle: Spanner oracle over the host.
        epsilon: Stretch parameter in ``(0, 1/g)``.
        rescale: Divide ``epsilon`` by ``s`` first. (default = False)
        g: Diameter constant. (default = ``settings.cluster_g``)
        credit_safety: Safety factor of the credit rate.
            (default = ``settings.credit_safety``)
        degree_threshold: High-degree threshold of the cluster graphs.
            (default = ``settings.degree_threshold``)
        threads: Worker threads for the scale classes.
            (default = ``settings.threads``)
        calibration: Oracle queries spent on estimating the weak sparsity.
            (default = ``settings.calibration_queries``)
        seed: Seed of the calibration queries. (default = 0)

    Returns:
        Spanner and diagnostics.

    Raises:
        InputError: If ``epsilon`` is out of range or a terminal is unknown.
        InfeasibleError: If the terminals are disconnected.
        ContractViolation: If the oracle breaks its contract.
        InvariantViolation: If a cluster or stretch invariant fails.
    """
    g = settings.resolve("cluster_g", g)
    stretch_constant = safety_factor(g)
    if rescale:
        epsilon = epsilon / stretch_constant
    epsilon = check_open_interval(epsilon, 0, 1 / g, "epsilon")
    if epsilon >= 1 / stretch_constant:
        logger.warning(
            "epsilon = %g is not below 1/(16g+1) = %g; cluster invariants may "
            "need deferred credit",
            epsilon,
            1 / stretch_constant,
        )
    safety = settings.resolve("credit_safety", credit_safety)
    threads = settings.resolve("threads", threads)
    calibration = settings.resolve("calibration_queries", calibration)

    metric = metric_completion(graph, terminals)
    mst_edges = minimum_spanning_tree(metric)
    mst_weight = sum(w for _, _, w in mst_edges)
    buckets = bucket_edges(metric, epsilon, mst_weight)

    base = GraphBuilder(graph, metric.terminals)
    for a, b, _ in mst_edges:
        base.add_path(metric.path(a, b))
    for a, b, _ in buckets.cheap:
        base.add_path(metric.path(a, b))

    queries = calibration_queries(metric, buckets, epsilon, calibration, seed)
    weak_sparsity = 1.0
    if queries:
        weak_sparsity = max(measure_sparsity(oracle, queries, threads).weak_ratio, 1.0)
    rate = credit_rate(epsilon, weak_sparsity, g, safety)
    logger.info(
        "k=%d, %d scale classes, Ws~%g, c(eps)=%g",
        metric.k,
        len(buckets.classes),
        weak_sparsity,
        rate,
    )

    def run_class(scale_class: int) -> ClusterHierarchy:
        hierarchy = ClusterHierarchy(
            metric,
            buckets,
            scale_class,
            base.copy(),
            mst_edges,
            oracle,
            epsilon,
            Fraction(rate),
            g=g,
            degree_threshold=degree_threshold,
        )
        hierarchy.run()
        return hierarchy

    classes = buckets.classes
    if classes:
        with ThreadPoolExecutor(max_workers=min(threads, len(classes))) as pool:
            hierarchies = dict(zip(classes, pool.map(run_class, classes)))
    else:
        hierarchies = {}

    spanner = base.copy()
    for hierarchy in hierarchies.values():
        spanner.add_graph(hierarchy.spanner.build())
    result = spanner.build()

    if oracle.max_weak_ratio > weak_sparsity:
        logger.warning(
            "Oracle reached weak sparsity %g above the calibrated %g",
            oracle.max_weak_ratio,
            weak_sparsity,
        )
    bound = 1 + stretch_constant * epsilon
    report = verify_stretch(result, graph, metric.terminals, bound)
    if not report.passed:
        raise InvariantViolation(
            f"Terminal pair {report.worst_pair} has stretch {report.max_stretch} above "
            f"{report.bound}"
        )
    diagnostics = {
        "epsilon": epsilon,
        "g": g,
        "stretch_bound": bound,
        "terminals": metric.k,
        "lightness": result.total_weight / mst_weight if mst_weight else 0.0,
        "max_stretch": report.max_stretch,
        "oracle_calls": oracle.calls,
        "levels": max((h.level + 1 for h in hierarchies.values()), default=0),
        "per_level": [
            entry.as_dict() for h in hierarchies.values() for entry in h.reports
        ],
        "repairs": sum(h.repairs for h in hierarchies.values()),
        "deferred_credit": float(
            sum((h.ledger.deferred for h in hierarchies.values()), Fraction(0))
        ),
        "credit_topups": sum(h.credit_topups for h in hierarchies.values()),
        "c_epsilon": rate,
        "ws_estimate": weak_sparsity,
        "scale_classes": classes,
        "buckets": buckets.as_dict(),
        "ledger": {str(j): h.ledger.summary() for j, h in hierarchies.items()},
        "weight": result.total_weight,
        "edges": result.number_of_edges(),
        "mst_weight": mst_weight,
        "settings": settings.as_dict(),
    }
    logger.info(
        "Subset spanner: %d edges, lightness %.3f, max stretch %.4f, %d oracle calls",
        result.number_of_edges(),
        diagnostics["lightness"],
        report.max_stretch,
        oracle.calls,
    )
    return SubsetSpannerResult(result, diagnostics, hierarchies)
