"""Command line interface of spanner-forge.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 invalid input,
4 any other spanner-forge error.
"""

import json
import logging
import typing as t
from pathlib import Path

import click

from spanner_forge.bench import (
    FORMATS,
    GENERATOR_BY_NAME,
    ORACLE_NAMES,
    InstanceSpec,
    dumps_report,
    dumps_rows,
    generate,
    make_oracle,
    make_report,
    report_rows,
    run_batch,
    summarize,
)
from spanner_forge.bench.generators import TERMINAL_RULES
from spanner_forge.config import settings
from spanner_forge.exceptions import InputError, SpannerForgeError
from spanner_forge.graph import (
    GraphInstance,
    WeightedGraph,
    graph_from_dict,
    graph_to_dict,
    read_edge_list,
    steiner_2approx,
    to_dot,
    verify_stretch,
)
from spanner_forge.oracles import OracleQuery, OracleStats, PointSet
from spanner_forge.ptas import PARTITIONER_CLASS_BY_NAME, run_ptas
from spanner_forge.subset import build_subset_spanner
from spanner_forge.treewidth import (
    heuristic_decomposition,
    held_karp,
    read_pace_td,
    subset_tsp_dp,
)
from spanner_forge.treewidth.decomposition import HEURISTICS

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_ERROR = 4

LOG_FORMAT = "[%(levelname)s] %(name)s: %(message)s"


def load_instance(
    path: str, terminals_path: t.Optional[str] = None
) -> t.Tuple[GraphInstance, t.Optional[PointSet]]:
    """Load a graph JSON, metric JSON, point CSV or edge-list file.

    Point sets become complete graphs. Without stored terminals every vertex
    is a terminal.
    """
    suffix = Path(path).suffix.lower()
    points = None
    if suffix == ".csv":
        points = PointSet.from_csv(path)
    elif suffix == ".json":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as error:
            raise InputError(f"Cannot read {path}: {error}") from error
        if isinstance(data, dict) and "dist" in data:
            points = PointSet.from_matrix_dict(data)
        else:
            instance = graph_from_dict(data)
    else:
        instance = read_edge_list(path, terminals_path)
    if points is not None:
        graph = points.complete_graph()
        instance = GraphInstance(graph, graph.vertices)
    if terminals_path is not None and suffix == ".json":
        tokens = Path(terminals_path).read_text(encoding="utf-8").split()
        try:
            instance = GraphInstance(instance.graph, tuple(int(x) for x in tokens))
        except ValueError as error:
            raise InputError(f"{terminals_path}: {error}") from error
    if not instance.terminals:
        instance = GraphInstance(instance.graph, instance.graph.vertices)
    return instance, points


def read_candidate(path: str) -> WeightedGraph:
    """Read a graph JSON file or the spanner stored in a ``spanner`` report."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as error:
        raise InputError(f"Cannot read {path}: {error}") from error
    if isinstance(data, dict) and isinstance(data.get("spanner"), dict):
        data = data["spanner"]
    return graph_from_dict(data).graph


def output(
    report: t.Mapping[str, t.Any],
    fmt: str,
    out: t.Optional[str],
    dot: t.Optional[str] = None,
) -> None:
    """Render a report as json, csv or dot and write it to ``out`` or stdout."""
    if fmt == "csv":
        text = dumps_rows(report_rows(report))
    elif fmt == "dot":
        if dot is None:
            raise click.UsageError("This command has no graph to draw as dot")
        text = dot
    else:
        text = dumps_report(report)
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text, encoding="utf-8")
        logger.info("Wrote %s", out)


def _common(func):
    func = click.option(
        "--out", type=click.Path(dir_okay=False), help="Output file (default stdout)."
    )(func)
    func = click.option(
        "--format", "fmt", type=click.Choice(FORMATS), default="json", show_default=True
    )(func)
    return func


def _eps(default: float):
    return click.option(
        "--eps", type=float, default=default, show_default=True, help="Epsilon."
    )


@click.group()
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default="WARNING",
    show_default=True,
)
@click.option("--threads", type=int, help="Worker threads (overrides settings).")
def cli(log_level: str, threads: t.Optional[int]):
    """Light subset spanners, oracles and subset TSP."""
    logging.basicConfig(level=log_level.upper(), format=LOG_FORMAT, force=True)
    if threads is not None:
        settings.threads(threads)


@cli.command(help="Generate a seeded instance.")
@click.argument("family", type=click.Choice(sorted(GENERATOR_BY_NAME)))
@click.option("--rows", type=int)
@click.option("--cols", type=int)
@click.option("-n", "n", type=int, help="Vertex or point count.")
@click.option("--dim", type=int)
@click.option("--radius", type=float)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--terminals", type=int, help="Terminal count (default all).")
@click.option("--rule", type=click.Choice(TERMINAL_RULES), default="random")
@click.option("--out", type=click.Path(dir_okay=False))
def gen(family, rows, cols, n, dim, radius, seed, terminals, rule, out):
    """Write an instance file."""
    given = dict(rows=rows, cols=cols, n=n, dim=dim, radius=radius)
    size = {key: value for key, value in given.items() if value is not None}
    generated = generate(InstanceSpec(family, size, seed, terminals, rule))
    if out is None:
        click.echo(generated.dumps().rstrip("\n"))
    else:
        generated.write(out)
    return EXIT_OK


@cli.command(help="Build a subset spanner.")
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--terminals", "terminals_path", type=click.Path(exists=True))
@_eps(0.5)
@click.option("--oracle", type=click.Choice(ORACLE_NAMES), default="separator")
@click.option("--g", "g", type=int, help="Diameter constant (default settings).")
@click.option("--raw-eps", is_flag=True, help="Use eps without dividing by 16g+1.")
@click.option("--seed", type=int, default=0, show_default=True)
@_common
def spanner(instance, terminals_path, eps, oracle, g, raw_eps, seed, fmt, out):
    """Build, verify and report a subset spanner."""
    loaded, points = load_instance(instance, terminals_path)
    result = build_subset_spanner(
        loaded.graph,
        loaded.terminals,
        make_oracle(oracle, loaded.graph, points),
        eps,
        rescale=not raw_eps,
        g=g,
        seed=seed,
    )
    report = make_report(
        "spanner",
        {
            "oracle": oracle,
            "diagnostics": result.diagnostics,
            "spanner": graph_to_dict(
                result.spanner, loaded.terminals, len(loaded.graph)
            ),
        },
    )
    output(report, fmt, out, to_dot(result.spanner, loaded.terminals))
    return EXIT_OK


@cli.command(help="Answer one oracle query and report its statistics.")
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--terminals", "terminals_path", type=click.Path(exists=True))
@_eps(0.25)
@click.option("--scale", type=float, required=True, help="Distance scale l.")
@click.option("--oracle", type=click.Choice(ORACLE_NAMES), default="separator")
@_common
def oracle(instance, terminals_path, eps, scale, oracle, fmt, out):
    """Query an oracle once and check its distance window."""
    loaded, points = load_instance(instance, terminals_path)
    query = OracleQuery(loaded.terminals, scale, eps)
    answer = make_oracle(oracle, loaded.graph, points).query(query)
    stats = OracleStats.from_output(answer, query)
    answer = answer.with_vertices(loaded.terminals)
    stretch = verify_stretch(answer, loaded.graph, loaded.terminals, 1 + eps)
    low, high = query.window
    window = [
        entry
        for entry in stretch.per_pair
        if low <= entry.graph_distance <= high
    ]
    violations = [list(e.pair) for e in window if e.ratio > (1 + eps) * (1 + 1e-9)]
    report = make_report(
        "oracle",
        {
            "oracle": oracle,
            "scale": scale,
            "epsilon": eps,
            "weight": stats.weight,
            "edges": stats.edge_count,
            "terminals": stats.terminal_count,
            "weak_ratio": stats.weak_ratio,
            "strong_ratio": stats.strong_ratio,
            "max_edge_length": stats.max_edge_length,
            "window_pairs": len(window),
            "window_violations": violations,
            "per_pair": [
                {"pair": list(e.pair), "d_graph": e.graph_distance, "ratio": e.ratio}
                for e in window
            ],
        },
    )
    output(report, fmt, out, to_dot(answer, loaded.terminals))
    return EXIT_VERIFY if violations else EXIT_OK


@cli.command(help="Exact subset TSP on a tree decomposition.")
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--terminals", "terminals_path", type=click.Path(exists=True))
@click.option("--td", "td_path", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--heuristic-td",
    type=click.Choice(sorted(HEURISTICS)),
    default="min-degree",
    show_default=True,
)
@click.option("--reduction", type=click.Choice(["rank", "keep-all"]))
@click.option("--check", is_flag=True, help="Compare with Held-Karp.")
@_common
def tsp(instance, terminals_path, td_path, heuristic_td, reduction, check, fmt, out):
    """Solve subset TSP exactly."""
    loaded, _ = load_instance(instance, terminals_path)
    if td_path is not None:
        decomposition = read_pace_td(td_path)
    else:
        decomposition = heuristic_decomposition(loaded.graph, heuristic_td)
    result = subset_tsp_dp(
        loaded.graph, loaded.terminals, decomposition, reduction=reduction
    )
    payload = result.as_dict()
    payload.update(width=result.width, largest_table=result.table_sizes)
    code = EXIT_OK
    if check:
        reference = held_karp(loaded.graph, loaded.terminals)
        payload["held_karp"] = reference
        if abs(reference - result.weight) > 1e-9 * max(1.0, reference):
            code = EXIT_VERIFY
    multigraph = loaded.graph.edge_subgraph(
        ((u, v) for u, v, _ in result.edges), loaded.terminals
    )
    output(make_report("tsp", payload), fmt, out, to_dot(multigraph, loaded.terminals))
    return code


@cli.command(help="Approximate subset TSP through a spanner.")
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--terminals", "terminals_path", type=click.Path(exists=True))
@_eps(0.5)
@click.option("--oracle", type=click.Choice(ORACLE_NAMES), default="separator")
@click.option(
    "--partitioner",
    type=click.Choice(sorted(PARTITIONER_CLASS_BY_NAME)),
    default="bfs-layer",
    show_default=True,
)
@click.option("--g", "g", type=int, help="Number of parts (default from eps).")
@_common
def ptas(instance, terminals_path, eps, oracle, partitioner, g, fmt, out):
    """Run the spanner, contraction and DP pipeline."""
    loaded, points = load_instance(instance, terminals_path)
    result = run_ptas(
        loaded.graph,
        loaded.terminals,
        eps,
        make_oracle(oracle, loaded.graph, points),
        PARTITIONER_CLASS_BY_NAME[partitioner](),
        g=g,
    )
    payload = result.as_dict()
    payload.update(result.report.as_dict())
    tour = loaded.graph.edge_subgraph(
        ((u, v) for u, v, _ in result.edges), loaded.terminals
    )
    output(make_report("ptas", payload), fmt, out, to_dot(tour, loaded.terminals))
    return EXIT_OK


@cli.command(help="Check stretch and lightness of a spanner against a graph.")
@click.argument("graph_path", type=click.Path(exists=True, dir_okay=False))
@click.argument("spanner_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--terminals", "terminals_path", type=click.Path(exists=True))
@click.option("--bound", type=float, help="Stretch bound (default 1 + eps).")
@_eps(0.0)
@_common
def verify(graph_path, spanner_path, terminals_path, bound, eps, fmt, out):
    """Report the stretch of every terminal pair; exit 1 on a violation."""
    loaded, _ = load_instance(graph_path, terminals_path)
    candidate = read_candidate(spanner_path)
    if bound is None:
        bound = 1 + eps
    stretch = verify_stretch(candidate, loaded.graph, loaded.terminals, bound)
    steiner = steiner_2approx(loaded.graph, loaded.terminals)
    lightness = (
        candidate.total_weight / steiner.total_weight if steiner.total_weight else None
    )
    report = make_report(
        "verify",
        {
            "stretch": stretch.as_dict(),
            "lightness": lightness,
            "weight": candidate.total_weight,
            "per_pair": stretch.as_dict()["per_pair"],
        },
    )
    output(report, fmt, out, to_dot(candidate, loaded.terminals))
    return EXIT_OK if stretch.passed else EXIT_VERIFY


@cli.command(help="Seeded spanner and verify runs over a worker pool.")
@click.argument("family", type=click.Choice(sorted(GENERATOR_BY_NAME)))
@click.option("--count", type=int, default=5, show_default=True)
@click.option("--rows", type=int)
@click.option("--cols", type=int)
@click.option("-n", "n", type=int)
@click.option("--terminals", type=int)
@click.option("--seed", type=int, default=0, show_default=True)
@_eps(0.5)
@click.option("--oracle", type=click.Choice(ORACLE_NAMES), default="separator")
@_common
def batch(family, count, rows, cols, n, terminals, seed, eps, oracle, fmt, out):
    """Run ``count`` instances with consecutive seeds."""
    size = {
        key: value
        for key, value in dict(rows=rows, cols=cols, n=n).items()
        if value is not None
    }
    specs = [
        InstanceSpec(family, size, seed + offset, terminals)
        for offset in range(count)
    ]
    summary = summarize(run_batch(specs, eps, oracle))
    output(make_report("batch", summary), fmt, out)
    return EXIT_OK if not summary["failed"] else EXIT_VERIFY


def main(argv: t.Optional[t.Sequence[str]] = None) -> int:
    """Run the CLI and translate errors into exit codes."""
    try:
        code = cli.main(
            args=list(argv) if argv is not None else None,
            prog_name="spanner-forge",
            standalone_mode=False,
        )
    except click.UsageError as error:
        error.show()
        return EXIT_USAGE
    except click.ClickException as error:
        error.show()
        return EXIT_INPUT
    except click.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_VERIFY
    except InputError as error:
        logger.error("%s", error)
        click.echo(f"Error: {error}", err=True)
        return EXIT_INPUT
    except SpannerForgeError as error:
        logger.error("%s: %s", type(error).__name__, error)
        click.echo(f"Error: {type(error).__name__}: {error}", err=True)
        return EXIT_ERROR
    return code if isinstance(code, int) else EXIT_OK
