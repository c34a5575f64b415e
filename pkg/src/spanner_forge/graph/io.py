"""Graph instance file formats.

* Graph JSON: ``{"vertices": N, "edges": [[u, v, w], ...], "terminals": [...]}``
  with 0-based integer vertex ids.
* Whitespace edge list (``u v w`` per line, ``#`` comments) with an optional
  terminal file (whitespace separated ids).
* DOT export for visual inspection.
"""

import json
import logging
import typing as t
from dataclasses import dataclass, field
from pathlib import Path

from spanner_forge.exceptions import InputError
from spanner_forge.graph.weighted_graph import Vertex, WeightedGraph

logger = logging.getLogger(__name__)

PathLike = t.Union[str, Path]


@dataclass(frozen=True)
class GraphInstance:
    """A graph with its designated terminals."""

    graph: WeightedGraph
    terminals: t.Tuple[Vertex, ...] = field(default_factory=tuple)

    def as_dict(self) -> t.Dict[str, t.Any]:
        """Graph JSON representation."""
        return graph_to_dict(self.graph, self.terminals)


def _vertex_id(value: t.Any, n_vertices: int, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(f"{what} {value!r} is not an integer vertex id")
    if not 0 <= value < n_vertices:
        raise InputError(f"{what} {value} is outside 0..{n_vertices - 1}")
    return value


def graph_from_dict(
    data: t.Mapping[str, t.Any], allow_parallel: bool = False
) -> GraphInstance:
    """Parse the graph JSON structure.

    Raises:
        InputError: If the structure is malformed.
    """
    if not isinstance(data, t.Mapping):
        raise InputError("Graph JSON must be an object")
    try:
        n_vertices = int(data["vertices"])
        raw_edges = data["edges"]
    except (KeyError, TypeError, ValueError) as error:
        raise InputError(f"Graph JSON is missing or has invalid {error}") from error
    if n_vertices < 0:
        raise InputError("Graph JSON has a negative vertex count")
    edges = []
    for entry in raw_edges:
        if not isinstance(entry, (list, tuple)) or len(entry) != 3:
            raise InputError(f"Edge entry {entry!r} must be [u, v, w]")
        u = _vertex_id(entry[0], n_vertices, "Edge endpoint")
        v = _vertex_id(entry[1], n_vertices, "Edge endpoint")
        edges.append((u, v, entry[2]))
    terminals = tuple(
        _vertex_id(value, n_vertices, "Terminal") for value in data.get("terminals", [])
    )
    if len(set(terminals)) != len(terminals):
        raise InputError("Terminal list contains duplicates")
    graph = WeightedGraph(edges, range(n_vertices), allow_parallel=allow_parallel)
    return GraphInstance(graph, terminals)


def graph_to_dict(
    graph: WeightedGraph,
    terminals: t.Iterable[Vertex] = (),
    n_vertices: t.Optional[int] = None,
) -> t.Dict[str, t.Any]:
    """Graph JSON structure of a graph with integer vertex ids.

    Args:
        graph: Graph to serialize.
        terminals: Terminals to store.
        n_vertices: Vertex count to declare. (default = largest id + 1)
    """
    if n_vertices is None:
        n_vertices = max(graph.vertices, default=-1) + 1
    edges = []
    for u, v, weight in graph.edges():
        edges.extend([[u, v, weight]] * graph.multiplicity(u, v))
    return {"vertices": n_vertices, "edges": edges, "terminals": list(terminals)}


def loads_graph(text: str, allow_parallel: bool = False) -> GraphInstance:
    """Parse graph JSON text."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as error:
        raise InputError(f"Invalid graph JSON: {error}") from error
    return graph_from_dict(data, allow_parallel=allow_parallel)


def read_graph(path: PathLike, allow_parallel: bool = False) -> GraphInstance:
    """Read a graph JSON file."""
    logger.debug("Reading graph JSON %s", path)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as error:
        raise InputError(f"Cannot read {path}: {error}") from error
    return loads_graph(text, allow_parallel=allow_parallel)


def write_graph(
    path: PathLike,
    graph: WeightedGraph,
    terminals: t.Iterable[Vertex] = (),
    n_vertices: t.Optional[int] = None,
) -> None:
    """Write a graph JSON file."""
    Path(path).write_text(
        json.dumps(graph_to_dict(graph, terminals, n_vertices)) + "\n",
        encoding="utf-8",
    )


def _parse_int(token: str, location: str) -> int:
    try:
        return int(token)
    except ValueError as error:
        raise InputError(f"{location}: {token!r} is not an integer id") from error


def read_edge_list(
    path: PathLike,
    terminals_path: t.Optional[PathLike] = None,
    allow_parallel: bool = False,
) -> GraphInstance:
    """Read a whitespace edge list and an optional terminal file.

    Raises:
        InputError: On malformed lines.
    """
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as error:
        raise InputError(f"Cannot read {path}: {error}") from error
    edges = []
    for number, line in enumerate(lines, start=1):
        content = line.split("#", 1)[0].split()
        if not content:
            continue
        location = f"{path}:{number}"
        if len(content) != 3:
            raise InputError(f"{location}: expected 'u v w', got {line!r}")
        try:
            weight = float(content[2])
        except ValueError as error:
            raise InputError(f"{location}: invalid weight {content[2]!r}") from error
        edges.append(
            (_parse_int(content[0], location), _parse_int(content[1], location), weight)
        )
    terminals: t.Tuple[int, ...] = ()
    if terminals_path is not None:
        try:
            tokens = Path(terminals_path).read_text(encoding="utf-8").split()
        except OSError as error:
            raise InputError(f"Cannot read {terminals_path}: {error}") from error
        terminals = tuple(_parse_int(token, str(terminals_path)) for token in tokens)
    graph = WeightedGraph(edges, terminals, allow_parallel=allow_parallel)
    return GraphInstance(graph, terminals)


def to_dot(
    graph: WeightedGraph,
    terminals: t.Iterable[Vertex] = (),
    name: str = "spanner",
) -> str:
    """DOT text with terminals drawn as boxes."""
    terminal_set = set(terminals)
    lines = [f"graph {name} {{"]
    for vertex in graph.vertices:
        shape = "box" if vertex in terminal_set else "circle"
        lines.append(f'  "{vertex}" [shape={shape}];')
    for u, v, weight in graph.edges():
        for _ in range(graph.multiplicity(u, v)):
            lines.append(f'  "{u}" -- "{v}" [label="{weight:g}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


__all__ = [
    "GraphInstance",
    "graph_from_dict",
    "graph_to_dict",
    "loads_graph",
    "read_edge_list",
    "read_graph",
    "to_dot",
    "write_graph",
]
