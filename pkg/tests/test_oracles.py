import math

import numpy as np
import pytest
from fixtures import grid3, grid4, star_tree, triangle, window_violations

from spanner_forge.exceptions import ContractViolation, InfeasibleError, InputError
from spanner_forge.graph import WeightedGraph
from spanner_forge.oracles import (
    ORACLE_CLASS_BY_NAME,
    CorrelationOracle,
    DoublingOracle,
    EuclideanOracle,
    IdentityMinorProvider,
    Minor,
    MinorOracle,
    MinorProvider,
    OracleQuery,
    OracleStats,
    PointSet,
    SeparatorOracle,
    TreeMinorProvider,
    close_pair_paths,
    greedy_spanner,
    measure_sparsity,
    prune_long_edges,
    r_net,
)


def random_points(n, seed=7):
    rng = np.random.Generator(np.random.PCG64(seed))
    return PointSet(coordinates=rng.random((n, 2)))


def line_points(n):
    return PointSet(coordinates=[[float(i), 0.0] for i in range(n)])


class TestOracleQuery:
    def test_window(self):
        query = OracleQuery((0, 1), 8.0, 0.5)
        assert query.window == (1.0, 8.0)

    @pytest.mark.parametrize(
        "terminals, scale, epsilon",
        [((), 1.0, 0.5), ((0, 0), 1.0, 0.5), ((0, 1), 0.0, 0.5), ((0, 1), 1.0, 1.0)],
    )
    def test_invalid(self, terminals, scale, epsilon):
        with pytest.raises(InputError):
            OracleQuery(terminals, scale, epsilon)


class TestPointSet:
    def test_modes(self):
        points = line_points(3)
        assert points.mode == "euclidean"
        assert points.dimension == 2
        assert points.distance(0, 2) == 2.0
        metric = PointSet(matrix=points.full_matrix, labels=("a", "b", "c"))
        assert metric.mode == "matrix"
        assert metric.dimension is None
        assert metric.distance("a", "c") == 2.0

    @pytest.mark.parametrize(
        "kwargs",
        [
            {},
            {"coordinates": [[0.0]], "matrix": [[0.0]]},
            {"coordinates": [[0.0, 1.0], [1.0]]},
            {"coordinates": [[0.0, math.nan]]},
            {"matrix": [[0, 1, 5], [1, 0, 1], [5, 1, 0]]},
            {"matrix": [[0, 1], [2, 0]]},
            {"matrix": [[1, 1], [1, 1]]},
            {"coordinates": [[0.0], [1.0]], "labels": [0]},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(InputError):
            PointSet(**kwargs)

    def test_unknown_label(self):
        with pytest.raises(InputError):
            line_points(2).distance(0, 5)

    def test_r_net(self):
        points = line_points(5)
        assert r_net(points, points.labels, 1.5) == [0, 2, 4]
        assert points.r_net([4, 3, 2, 1, 0], 1.0) == [4, 2, 0]
        with pytest.raises(InputError):
            r_net(points, points.labels, 0.0)

    def test_from_graph(self, triangle):
        space = PointSet.from_graph(triangle)
        assert space.distance(0, 2) == 1.0
        with pytest.raises(InfeasibleError):
            PointSet.from_graph(WeightedGraph([(0, 1, 1.0)], [2]))

    def test_csv(self, tmp_path):
        points = random_points(5)
        path = tmp_path / "points.csv"
        path.write_text(points.to_csv())
        assert np.array_equal(PointSet.from_csv(path).coordinates, points.coordinates)
        with pytest.raises(InputError):
            PointSet(matrix=points.full_matrix).to_csv()

    def test_matrix_dict(self):
        points = PointSet(matrix=[[0, 2], [2, 0]])
        assert PointSet.from_matrix_dict(points.to_matrix_dict()).distance(0, 1) == 2
        with pytest.raises(InputError):
            PointSet.from_matrix_dict({"n": 3, "dist": [[0, 2], [2, 0]]})

    def test_complete_graph_skips_coincident(self):
        points = PointSet(coordinates=[[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]])
        graph = points.complete_graph()
        assert graph.number_of_edges() == 2
        assert not graph.has_edge(0, 1)


class TestOracleBase:
    def test_single_terminal(self):
        oracle = EuclideanOracle(line_points(3))
        output = oracle([1], 1.0, 0.5)
        assert output.vertices == (1,)
        assert output.number_of_edges() == 0
        assert oracle.calls == 1

    def test_unknown_terminal(self, triangle):
        with pytest.raises(InputError):
            SeparatorOracle(triangle)([0, 9], 1.0, 0.5)

    def test_prune_long_edges(self, triangle):
        graph = WeightedGraph([(0, 1, 1.0), (1, 2, 3.0)])
        assert prune_long_edges(graph, 2.0).edges() == ((0, 1, 1.0),)

    def test_registry(self):
        assert sorted(ORACLE_CLASS_BY_NAME) == [
            "correlation",
            "doubling",
            "euclidean",
            "minor",
            "separator",
        ]

    def test_measure_sparsity(self):
        oracle = EuclideanOracle(random_points(20))
        queries = [
            OracleQuery(tuple(range(20)), 0.3, 0.25),
            OracleQuery(tuple(range(0, 20, 2)), 0.6, 0.25),
        ]
        report = measure_sparsity(oracle, queries, threads=2)
        assert len(report.per_query) == 2
        assert report.weak_ratio == max(s.weak_ratio for s in report.per_query)
        assert report.as_dict()["queries"] == 2
        assert oracle.calls == 2
        for stats in report.per_query:
            assert stats.max_edge_length <= 2 * stats.scale
            assert stats.satisfies_weight_bound()
            assert stats.satisfies_edge_bound()
        with pytest.raises(InputError):
            measure_sparsity(oracle, [])

    def test_stats(self):
        output = WeightedGraph([(0, 1, 2.0), (1, 2, 2.0)])
        stats = OracleStats.from_output(output, OracleQuery((0, 1, 2), 2.0, 0.5))
        assert stats.weak_ratio == pytest.approx(4 / 6)
        assert stats.strong_ratio == pytest.approx(2 / 3)


class TestEuclideanOracle:
    def test_greedy_on_a_line(self):
        points = line_points(4)
        spanner = greedy_spanner(points.labels, points.full_matrix, 1.5)
        assert spanner.edges() == ((0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0))

    def test_window(self):
        oracle = EuclideanOracle(random_points(30))
        query = OracleQuery(tuple(range(30)), 0.3, 0.25)
        output = oracle.query(query)
        assert set(query.terminals) <= set(output.vertices)
        assert max(w for _, _, w in output.edges()) <= 0.6
        assert window_violations(output, oracle.distance, query) == []

    def test_needs_coordinates(self, triangle):
        with pytest.raises(InputError):
            EuclideanOracle.from_graph(triangle)
        with pytest.raises(InputError):
            EuclideanOracle(PointSet(matrix=[[0, 1], [1, 0]]))


class TestDoublingOracle:
    @pytest.mark.parametrize("cls", [DoublingOracle, CorrelationOracle])
    def test_window(self, cls):
        oracle = cls(random_points(40, seed=3))
        query = OracleQuery(tuple(range(40)), 0.4, 0.5)
        output = oracle.query(query)
        assert window_violations(output, oracle.distance, query) == []

    def test_from_graph(self, grid4):
        oracle = DoublingOracle.from_graph(grid4)
        query = OracleQuery(grid4.vertices, 3.0, 0.5)
        assert window_violations(oracle.query(query), oracle.distance, query) == []

    def test_coincident_points(self):
        oracle = DoublingOracle(
            PointSet(coordinates=[[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]])
        )
        output = oracle([0, 1, 2], 1.0, 0.5)
        assert output.has_edge(0, 2)
        assert output.has_edge(1, 2)


class TestMinorOracle:
    def test_tree_minor(self, star_tree):
        minor = TreeMinorProvider().minor(star_tree, (1, 4), 0.5)
        assert minor.graph.edges() == ((1, 4, 5.0),)
        assert minor.path(4, 1) == (4, 3, 0, 1)
        assert minor.steiner_vertices([1, 4]) == []

    def test_tree_minor_errors(self, triangle):
        with pytest.raises(InputError):
            TreeMinorProvider().minor(triangle, (0, 1), 0.5)
        forest = WeightedGraph([(0, 1, 1.0), (2, 3, 1.0)])
        with pytest.raises(InfeasibleError):
            TreeMinorProvider().minor(forest, (0, 3), 0.5)

    def test_default_provider(self, star_tree, grid3):
        assert isinstance(MinorOracle(star_tree).provider, TreeMinorProvider)
        assert isinstance(MinorOracle(grid3).provider, IdentityMinorProvider)

    def test_exact_on_trees(self, star_tree):
        oracle = MinorOracle.from_graph(star_tree)
        query = OracleQuery((1, 2, 4, 5), 4.0, 0.5)
        output = oracle.query(query)
        assert output.is_subgraph_of(star_tree)
        assert window_violations(output, oracle.distance, query) == []

    def test_drops_long_minor_edges(self, star_tree):
        output = MinorOracle(star_tree)([1, 4], 2.0, 0.5)
        assert output.number_of_edges() == 0

    def test_contract_violation(self, triangle):
        class Broken(MinorProvider):
            def minor(self, graph, terminals, epsilon):
                return Minor(WeightedGraph([(0, 2, 0.5)]), {(0, 2): (0, 1, 2)})

        oracle = MinorOracle(triangle, Broken())
        with pytest.raises(ContractViolation):
            oracle([0, 2], 1.0, 0.5)


class TestSeparatorOracle:
    def test_close_pair_paths(self, grid3):
        paths = close_pair_paths(grid3, (0, 1, 2), 2.0)
        assert sorted(paths) == [(0, 1), (1, 2)]

    def test_window(self, grid4):
        oracle = SeparatorOracle(grid4)
        query = OracleQuery(grid4.vertices, 4.0, 0.5)
        output = oracle.query(query)
        assert output.is_subgraph_of(grid4)
        assert window_violations(output, oracle.distance, query) == []
        assert oracle.last_stats.calls >= 1

    def test_stats_from_concurrent_queries(self, grid4):
        oracle = SeparatorOracle(grid4)
        queries = [
            OracleQuery(grid4.vertices, scale, 0.5) for scale in (2.0, 3.0, 4.0, 5.0)
        ]
        measure_sparsity(oracle, queries * 2, threads=4)
        assert oracle.calls == 8
        assert len(oracle.stats_log) == 8
        assert all(stats.calls >= 1 for stats in oracle.stats_log)
        assert oracle.last_stats is oracle.stats_log[-1]

    def test_subset_of_terminals(self, grid4):
        oracle = SeparatorOracle.from_graph(grid4)
        query = OracleQuery((0, 5, 10, 15, 3, 12), 3.0, 0.25)
        assert window_violations(oracle.query(query), oracle.distance, query) == []
