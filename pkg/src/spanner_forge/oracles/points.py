"""Point sets in Euclidean space or given by an explicit distance matrix."""

import csv
import json
import logging
import typing as t
from functools import cached_property
from pathlib import Path

import numpy as np

from spanner_forge.config import settings
from spanner_forge.exceptions import InfeasibleError, InputError
from spanner_forge.graph import Vertex, WeightedGraph, distance_matrix

logger = logging.getLogger(__name__)


class PointSet:
    """Finite metric space.

    Exactly one of ``coordinates`` (Euclidean mode) and ``matrix`` (abstract
    metric mode) must be given. Points are addressed by their labels, which
    default to ``0..n-1``.

    Args:
        coordinates: ``n x d`` array of coordinates.
        matrix: ``n x n`` distance matrix.
        labels: Point identifiers in row order.

    Raises:
        InputError: If both or none of the representations are given, the
            coordinates are ragged or the matrix is not a metric.
    """

    def __init__(
        self,
        coordinates: t.Optional[t.Any] = None,
        matrix: t.Optional[t.Any] = None,
        labels: t.Optional[t.Sequence[Vertex]] = None,
    ):
        if (coordinates is None) == (matrix is None):
            raise InputError("Give either coordinates or a distance matrix")
        if coordinates is not None:
            self._coordinates: t.Optional[np.ndarray] = self._as_coordinates(
                coordinates
            )
            self._matrix: t.Optional[np.ndarray] = None
            size = self._coordinates.shape[0]
        else:
            self._coordinates = None
            self._matrix = np.asarray(matrix, dtype=float)
            size = self._matrix.shape[0] if self._matrix.ndim == 2 else -1
            self.validate()
        self._labels = tuple(range(size)) if labels is None else tuple(labels)
        if len(self._labels) != size or len(set(self._labels)) != size:
            raise InputError("Point labels must be unique and match the point count")
        self._index = {label: i for i, label in enumerate(self._labels)}

    @staticmethod
    def _as_coordinates(coordinates: t.Any) -> np.ndarray:
        rows = [list(row) for row in coordinates]
        dimensions = {len(row) for row in rows}
        if len(dimensions) > 1:
            raise InputError(f"Points have mismatching dimensions {sorted(dimensions)}")
        try:
            array = np.asarray(rows, dtype=float)
        except (TypeError, ValueError) as error:
            raise InputError(f"Invalid coordinates: {error}") from error
        if array.ndim != 2:
            array = array.reshape(len(rows), -1)
        if not np.all(np.isfinite(array)):
            raise InputError("Coordinates must be finite")
        return array

    def validate(self, tolerance: t.Optional[float] = None) -> None:
        """Check the metric axioms of matrix mode.

        Raises:
            InputError: Naming the violated axiom.
        """
        if self._matrix is None:
            return
        tolerance = settings.resolve("tolerance", tolerance)
        matrix = self._matrix
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise InputError("Distance matrix must be square")
        if not np.all(np.isfinite(matrix)) or np.any(matrix < 0):
            raise InputError("Distances must be finite and non-negative")
        if np.any(np.diag(matrix) != 0):
            raise InputError("Distance matrix must have a zero diagonal")
        if not np.allclose(matrix, matrix.T, rtol=tolerance, atol=0):
            raise InputError("Distance matrix must be symmetric")
        # one row at a time keeps memory quadratic
        for i, row in enumerate(matrix):
            through = np.min(row[:, None] + matrix, axis=0)
            broken = np.flatnonzero(row > through * (1 + tolerance))
            if broken.size:
                raise InputError(
                    f"Triangle inequality violated for points {i} "
                    f"and {int(broken[0])}"
                )

    @property
    def mode(self) -> str:
        """``"euclidean"`` or ``"matrix"``."""
        return "euclidean" if self._coordinates is not None else "matrix"

    @property
    def dimension(self) -> t.Optional[int]:
        """Coordinate dimension (None in matrix mode)."""
        if self._coordinates is None:
            return None
        return int(self._coordinates.shape[1])

    @property
    def labels(self) -> t.Tuple[Vertex, ...]:
        """Point identifiers."""
        return self._labels

    @property
    def coordinates(self) -> t.Optional[np.ndarray]:
        """Coordinates in Euclidean mode."""
        return self._coordinates

    def __len__(self) -> int:
        return len(self._labels)

    def __contains__(self, label: Vertex) -> bool:
        return label in self._index

    def positions(self, labels: t.Iterable[Vertex]) -> t.List[int]:
        """Row indices of the given labels.

        Raises:
            InputError: If a label is unknown.
        """
        try:
            return [self._index[label] for label in labels]
        except KeyError as error:
            raise InputError(f"Unknown point {error.args[0]!r}") from error

    @cached_property
    def full_matrix(self) -> np.ndarray:
        """All pairwise distances."""
        if self._matrix is not None:
            return self._matrix
        diff = self._coordinates[:, None, :] - self._coordinates[None, :, :]
        return np.sqrt(np.sum(diff * diff, axis=-1))

    def distances(self, labels: t.Sequence[Vertex]) -> np.ndarray:
        """Distance matrix restricted to the given labels (in that order)."""
        rows = self.positions(labels)
        if self._matrix is not None:
            return self._matrix[np.ix_(rows, rows)]
        points = self._coordinates[rows]
        diff = points[:, None, :] - points[None, :, :]
        return np.sqrt(np.sum(diff * diff, axis=-1))

    def distance(self, a: Vertex, b: Vertex) -> float:
        """Distance between two points."""
        i, j = self.positions((a, b))
        if self._matrix is not None:
            return float(self._matrix[i, j])
        return float(np.linalg.norm(self._coordinates[i] - self._coordinates[j]))

    def r_net(self, subset: t.Sequence[Vertex], radius: float) -> t.List[Vertex]:
        """Greedy ``radius``-net of ``subset`` (see :func:`r_net`)."""
        return r_net(self, subset, radius)

    def complete_graph(
        self, subset: t.Optional[t.Sequence[Vertex]] = None
    ) -> WeightedGraph:
        """Complete graph over the points weighted by distance.

        Pairs at distance zero get no edge.
        """
        labels = self._labels if subset is None else tuple(subset)
        matrix = self.distances(labels)
        edges = [
            (labels[i], labels[j], float(matrix[i, j]))
            for i in range(len(labels))
            for j in range(i + 1, len(labels))
            if matrix[i, j] > 0
        ]
        return WeightedGraph(edges, labels)

    @classmethod
    def from_graph(cls, graph: WeightedGraph) -> "PointSet":
        """Shortest-path metric of a connected graph, labelled by vertex.

        Raises:
            InfeasibleError: If the graph is disconnected.
        """
        matrix = distance_matrix(graph, graph.vertices)
        if np.any(np.isinf(matrix)):
            i, j = np.argwhere(np.isinf(matrix))[0]
            pair = (graph.vertices[i], graph.vertices[j])
            raise InfeasibleError(f"Vertices {pair} are disconnected", pair=pair)
        return cls(matrix=matrix, labels=graph.vertices)

    @classmethod
    def from_csv(cls, path: t.Union[str, Path]) -> "PointSet":
        """Read one comma-separated point per line."""
        try:
            with open(path, newline="", encoding="utf-8") as handle:
                rows = [row for row in csv.reader(handle) if row and row[0].strip()]
        except OSError as error:
            raise InputError(f"Cannot read {path}: {error}") from error
        try:
            coordinates = [[float(value) for value in row] for row in rows]
        except ValueError as error:
            raise InputError(f"{path}: {error}") from error
        return cls(coordinates=coordinates)

    @classmethod
    def from_matrix_dict(cls, data: t.Mapping[str, t.Any]) -> "PointSet":
        """Build from ``{"n": N, "dist": [[...]]}``."""
        try:
            size = int(data["n"])
            matrix = np.asarray(data["dist"], dtype=float)
        except (KeyError, TypeError, ValueError) as error:
            raise InputError(f"Invalid metric JSON: {error}") from error
        if matrix.shape != (size, size):
            raise InputError(f"Metric JSON declares n={size} but has {matrix.shape}")
        return cls(matrix=matrix)

    @classmethod
    def from_matrix_json(cls, path: t.Union[str, Path]) -> "PointSet":
        """Read the metric-matrix JSON format."""
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as error:
            raise InputError(f"Cannot read {path}: {error}") from error
        return cls.from_matrix_dict(data)

    def to_csv(self) -> str:
        """Coordinates as CSV text (Euclidean mode only)."""
        if self._coordinates is None:
            raise InputError("Only Euclidean point sets can be written as CSV")
        return "".join(
            ",".join(repr(float(value)) for value in row) + "\n"
            for row in self._coordinates
        )

    def to_matrix_dict(self) -> t.Dict[str, t.Any]:
        """Metric-matrix JSON structure."""
        return {"n": len(self), "dist": self.full_matrix.tolist()}

    def __repr__(self) -> str:
        return f"PointSet(n={len(self)}, mode={self.mode}, dimension={self.dimension})"


def r_net(space: PointSet, subset: t.Sequence[Vertex], radius: float) -> t.List[Vertex]:
    """Greedy net of ``subset`` processed in the given order.

    A point joins the net unless it lies within ``radius`` of a net point, so
    net points are pairwise more than ``radius`` apart and every point of the
    subset is within ``radius`` of the net.

    Raises:
        InputError: If ``radius`` is not positive.
    """
    if not radius > 0:
        raise InputError(f"Net radius must be positive, got {radius}")
    subset = tuple(subset)
    if not subset:
        return []
    matrix = space.distances(subset)
    chosen: t.List[int] = []
    for i in range(len(subset)):
        if not chosen or np.min(matrix[i, chosen]) > radius:
            chosen.append(i)
    return [subset[i] for i in chosen]
