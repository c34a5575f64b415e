import pytest

from spanner_forge.config import settings
from spanner_forge.graph import WeightedGraph


@pytest.fixture()
def triangle():
    yield WeightedGraph([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])


@pytest.fixture()
def path_graph():
    yield WeightedGraph([(0, 1, 2.0), (1, 2, 2.0), (2, 3, 1.0), (3, 4, 3.0)])


@pytest.fixture()
def grid3():
    from spanner_forge.bench.generators import grid_graph

    yield grid_graph(3, 3)


@pytest.fixture()
def grid4():
    from spanner_forge.bench.generators import grid_graph

    yield grid_graph(4, 4)


@pytest.fixture()
def star_tree():
    yield WeightedGraph(
        [(0, 1, 1.0), (0, 2, 2.0), (0, 3, 3.0), (3, 4, 1.0), (3, 5, 2.0)]
    )


@pytest.fixture()
def clean_settings():
    settings.reset()
    yield settings
    settings.reset()


def window_violations(output, distance, query):
    """Terminal pairs in the query window that the oracle output stretches."""
    from spanner_forge.graph import shortest_paths, within_tolerance

    low, high = query.window
    failures = []
    terminals = query.terminals
    for i, a in enumerate(terminals):
        reached, _ = shortest_paths(output, a)
        for b in terminals[i + 1 :]:
            d = distance(a, b)
            if low <= d <= high and not within_tolerance(
                reached[b], (1 + query.epsilon) * d
            ):
                failures.append((a, b))
    return failures
