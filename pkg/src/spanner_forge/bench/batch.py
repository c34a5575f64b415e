"""Batch spanner verification over seeded instances."""

import logging
import time
import typing as t
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from spanner_forge.bench.generators import InstanceSpec, generate
from spanner_forge.config import settings
from spanner_forge.exceptions import InputError, SpannerForgeError
from spanner_forge.graph import WeightedGraph
from spanner_forge.oracles import ORACLE_CLASS_BY_NAME, PointSet, SpannerOracle
from spanner_forge.subset import SubsetSpannerOracle, build_subset_spanner

logger = logging.getLogger(__name__)


@dataclass
class BatchEntry:
    """Outcome of one batch instance."""

    spec: InstanceSpec
    passed: bool
    max_stretch: t.Optional[float] = None
    lightness: t.Optional[float] = None
    oracle_calls: int = 0
    seconds: float = 0.0
    error: t.Optional[str] = None
    details: t.Dict[str, t.Any] = field(default_factory=dict)

    def as_dict(self) -> t.Dict[str, t.Any]:
        """Flat JSON-friendly row."""
        row = {
            "family": self.spec.family,
            "seed": self.spec.seed,
            "passed": self.passed,
            "max_stretch": self.max_stretch,
            "lightness": self.lightness,
            "oracle_calls": self.oracle_calls,
            "seconds": self.seconds,
            "error": self.error,
        }
        row.update(self.details)
        return row


ORACLE_NAMES = tuple(ORACLE_CLASS_BY_NAME) + ("subset",)


def make_oracle(
    name: str,
    graph: t.Optional[WeightedGraph] = None,
    points: t.Optional[PointSet] = None,
) -> SpannerOracle:
    """Create an oracle by name over a graph or a point set.

    ``"subset"`` wraps the separator-driven subset spanner as an oracle.

    Raises:
        InputError: If the name is unknown or the oracle cannot work on the
            given input.
    """
    if name == "subset":
        return SubsetSpannerOracle.from_graph(graph)
    try:
        cls = ORACLE_CLASS_BY_NAME[name]
    except KeyError as error:
        raise InputError(
            f"Unknown oracle {name!r}; use one of {list(ORACLE_NAMES)}"
        ) from error
    if points is not None and name in ("euclidean", "doubling", "correlation"):
        return cls(points)
    return cls.from_graph(graph)


def run_instance(
    spec: InstanceSpec,
    epsilon: float,
    oracle_name: str = "separator",
    oracle_factory: t.Optional[t.Callable[..., SpannerOracle]] = None,
) -> BatchEntry:
    """Generate, build and verify one instance; errors become failed entries."""
    started = time.perf_counter()
    try:
        generated = generate(spec)
        instance = generated.graph_instance
        factory = oracle_factory or make_oracle
        oracle = factory(oracle_name, instance.graph, generated.points)
        result = build_subset_spanner(
            instance.graph, instance.terminals, oracle, epsilon, rescale=True
        )
    except SpannerForgeError as error:
        logger.warning("Instance %s seed %d failed: %s", spec.family, spec.seed, error)
        return BatchEntry(
            spec,
            False,
            seconds=time.perf_counter() - started,
            error=f"{type(error).__name__}: {error}",
        )
    diagnostics = result.diagnostics
    return BatchEntry(
        spec,
        diagnostics["max_stretch"] <= diagnostics["stretch_bound"],
        diagnostics["max_stretch"],
        diagnostics["lightness"],
        diagnostics["oracle_calls"],
        time.perf_counter() - started,
        details={"terminals": diagnostics["terminals"], "edges": diagnostics["edges"]},
    )


def run_batch(
    specs: t.Sequence[InstanceSpec],
    epsilon: float,
    oracle_name: str = "separator",
    threads: t.Optional[int] = None,
) -> t.List[BatchEntry]:
    """Run :func:`run_instance` over a thread pool; results keep input order."""
    threads = settings.resolve("threads", threads)
    if not specs:
        return []
    with ThreadPoolExecutor(max_workers=min(threads, len(specs))) as pool:
        entries = list(
            pool.map(lambda spec: run_instance(spec, epsilon, oracle_name), specs)
        )
    failed = sum(1 for entry in entries if not entry.passed)
    logger.info("Batch of %d instances: %d failed", len(entries), failed)
    return entries


def summarize(entries: t.Sequence[BatchEntry]) -> t.Dict[str, t.Any]:
    """Summary payload of a batch."""
    stretches = [e.max_stretch for e in entries if e.max_stretch is not None]
    return {
        "count": len(entries),
        "passed": sum(1 for e in entries if e.passed),
        "failed": sum(1 for e in entries if not e.passed),
        "max_stretch": max(stretches, default=None),
        "instances": [entry.as_dict() for entry in entries],
    }
