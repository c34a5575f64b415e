from fractions import Fraction

import networkx as nx
import pytest
from fixtures import grid3, grid4, path_graph, window_violations

from spanner_forge.exceptions import CreditExhausted, InputError, InvariantViolation
from spanner_forge.graph import GraphBuilder, metric_completion
from spanner_forge.oracles import MinorOracle, OracleQuery, SeparatorOracle
from spanner_forge.subset import (
    DEFERRED,
    Cluster,
    CreditLedger,
    SubsetSpannerOracle,
    break_tree,
    bucket_edges,
    build_cluster_graph,
    build_subset_spanner,
    calibration_queries,
    close_components,
    cluster_tree,
    credit_rate,
    effective_diameter,
    high_degree_threshold,
    locate,
    oracle_from_subset_spanner,
    safety_factor,
    terminal_diameter,
)
from spanner_forge.subset.clusters import diameter_bound


class TestBuckets:
    @pytest.mark.parametrize(
        "weight, expected", [(5.0, (1, 0)), (10.0, (2, 0)), (20.0, (1, 1))]
    )
    def test_locate(self, weight, expected):
        assert locate(weight, 1.0, 0.25) == expected

    def test_every_edge_once(self, grid4):
        metric = metric_completion(grid4, grid4.vertices)
        buckets = bucket_edges(metric, 0.1)
        assert buckets.w0 == pytest.approx(15 / 256)
        heavy = buckets.heavy_edges()
        assert len(heavy) + len(buckets.cheap) == 120
        assert all(w <= buckets.w0 / 0.1 for _, _, w in buckets.cheap)
        for (j, i), edges in buckets.buckets.items():
            assert 1 <= j <= buckets.class_count
            assert 0 <= i <= buckets.level_bound
            for _, _, weight in edges:
                assert buckets.scale(j, i) / 2 < weight <= buckets.scale(j, i)
        assert buckets.as_dict()["cheap"] == len(buckets.cheap)

    def test_invalid_epsilon(self, grid3):
        with pytest.raises(InputError):
            bucket_edges(metric_completion(grid3, [0, 8]), 1.0)


class TestLedger:
    def test_movements(self):
        ledger = CreditLedger()
        ledger.mint(("a",), 3)
        ledger.transfer(("a",), ("b",), Fraction(1, 2))
        ledger.debit(("b",), Fraction(1, 4))
        assert ledger.balance(("a",)) == Fraction(5, 2)
        assert ledger.balance(("b",)) == Fraction(1, 4)
        assert ledger.residual == Fraction(11, 4)
        assert [event.kind for event in ledger.events] == ["mint", "transfer", "debit"]
        ledger.check_conservation()
        assert ledger.summary()["spent"] == 0.25

    def test_exhausted(self):
        ledger = CreditLedger()
        ledger.mint(("a",), 1)
        with pytest.raises(CreditExhausted) as error:
            ledger.debit(("a",), 2, "too much")
        assert len(error.value.events) == 1
        with pytest.raises(InvariantViolation):
            ledger.mint(("a",), -1)

    def test_take_and_pay(self):
        ledger = CreditLedger()
        ledger.mint(("a",), 1)
        ledger.mint(("b",), 2)
        assert ledger.take([("a",), ("b",)], ("c",), 4) == 1
        assert ledger.balance(("c",)) == 3
        assert ledger.pay([("c",)], 5) == 2
        assert ledger.balance(("c",)) == 0

    def test_deferred(self):
        ledger = CreditLedger()
        ledger.mint_deferred(DEFERRED, Fraction(3, 2))
        ledger.debit(DEFERRED, Fraction(3, 2))
        assert ledger.deferred == Fraction(3, 2)
        ledger.check_conservation()
        assert ledger.events[-1].as_dict()["source"] == ["deferred"]


class TestClusters:
    def test_terminal_diameter(self, grid3):
        edges = [(0, 1), (1, 2), (1, 4)]
        assert terminal_diameter(grid3, edges, [0, 2, 4]) == 2.0
        with pytest.raises(InvariantViolation):
            terminal_diameter(grid3, [(0, 1)], [0, 8])

    def test_cluster(self):
        cluster = Cluster(3, 1, 2, frozenset({7, 5}), (0, 1), diameter=1.5)
        assert cluster.representative == 5
        assert cluster.account == ("cluster", 1, 3)
        assert cluster.as_dict()["terminals"] == [5, 7]

    def test_cluster_tree(self):
        owner = {10: 0, 11: 1, 12: 2}
        mst = [(10, 12, 3.0), (11, 12, 2.0), (10, 11, 1.0)]
        tree = cluster_tree([0, 1, 2], owner, mst)
        assert sorted(tree.edges) == [(0, 1), (1, 2)]
        assert tree.edges[1, 2]["pair"] == (11, 12)

    def test_effective_diameter(self):
        tree = nx.Graph()
        tree.add_edge(0, 1, weight=1.0)
        tree.add_edge(1, 2, weight=2.0)
        diameters = {0: 0.5, 1: 0.0, 2: 1.0}
        assert effective_diameter(tree, [0, 1, 2], diameters) == 4.5
        assert effective_diameter(tree, [0, 1], diameters) == 1.5

    def test_break_tree(self):
        tree = nx.path_graph(5)
        nx.set_edge_attributes(tree, 1.0, "weight")
        tree.add_node(7)
        diameters = {v: 0.0 for v in tree}
        pieces = break_tree(tree, tree.nodes, 1.0, diameters)
        assert pieces == [frozenset({0, 1, 2}), frozenset({3, 4}), frozenset({7})]
        assert break_tree(tree, tree.nodes, 10.0, diameters)[0] == frozenset(range(5))

    def test_cluster_graph(self, grid3):
        owner = {v: v for v in grid3.vertices}
        bucket = [(0, 2, 2.0), (0, 8, 4.0), (6, 8, 2.0)]
        empty = GraphBuilder(grid3, grid3.vertices)
        graph = build_cluster_graph(grid3.vertices, owner, bucket, empty, 0.1, 6)
        assert sorted(graph.edges) == [(0, 2), (0, 8), (6, 8)]
        assert graph.edges[0, 2]["pair"] == (0, 2)
        top = empty.copy()
        top.add_path([0, 1, 2])
        graph = build_cluster_graph(grid3.vertices, owner, bucket, top, 0.1, 6)
        assert not graph.has_edge(0, 2)
        owner[2] = 0
        with pytest.raises(InvariantViolation):
            build_cluster_graph(grid3.vertices, owner, bucket, empty, 0.1, 6)

    def test_cluster_graph_keeps_lightest(self, grid3):
        owner = {0: 0, 1: 0, 7: 1, 8: 1}
        bucket = [(0, 8, 4.0), (1, 7, 2.0), (0, 7, 3.0)]
        empty = GraphBuilder(grid3, owner)
        graph = build_cluster_graph([0, 1], owner, bucket, empty, 0.1, 6)
        assert graph.edges[0, 1]["pair"] == (1, 7)

    def test_diameter_bound(self):
        assert diameter_bound(3.0, [1.0, 2.0, 5.0]) == 10.0
        assert diameter_bound(3.0, []) == 3.0


class TestConstants:
    def test_values(self):
        assert safety_factor(29) == 465
        assert high_degree_threshold(0.5, 6) == 25
        assert credit_rate(0.5, 2.0, 6) == 48.0
        assert credit_rate(0.5, 20.0, 6, safety=2.0) == 160.0


class TestBuilder:
    def test_cheap_only(self, grid4):
        result = build_subset_spanner(
            grid4, grid4.vertices, SeparatorOracle(grid4), 0.5, rescale=True
        )
        assert result.spanner.is_subgraph_of(grid4)
        assert result.diagnostics["max_stretch"] <= result.diagnostics["stretch_bound"]
        assert result.diagnostics["epsilon"] == pytest.approx(0.5 / 465)

    @pytest.mark.parametrize("oracle_class", [SeparatorOracle, MinorOracle])
    def test_levels(self, grid4, oracle_class):
        terminals = grid4.vertices
        result = build_subset_spanner(
            grid4, terminals, oracle_class(grid4), 0.05, g=6, threads=2
        )
        diagnostics = result.diagnostics
        assert diagnostics["stretch_bound"] == pytest.approx(1 + 97 * 0.05)
        assert diagnostics["max_stretch"] <= diagnostics["stretch_bound"]
        assert diagnostics["levels"] >= 1
        assert diagnostics["per_level"]
        assert diagnostics["terminals"] == 16
        assert result.spanner.is_subgraph_of(grid4)
        for hierarchy in result.hierarchies.values():
            hierarchy.ledger.check_conservation()
            ell = hierarchy.scale(hierarchy.level)
            for cluster in hierarchy.clusters.values():
                assert cluster.diameter <= 6 * ell * (1 + 1e-9)

    def test_deterministic(self, grid4):
        terminals = [0, 3, 12, 15, 5]
        first = build_subset_spanner(
            grid4, terminals, SeparatorOracle(grid4), 0.05, g=6
        )
        second = build_subset_spanner(
            grid4, terminals, SeparatorOracle(grid4), 0.05, g=6
        )
        assert first.spanner == second.spanner

    def test_single_terminal(self, grid3):
        result = build_subset_spanner(grid3, [4], SeparatorOracle(grid3), 0.01)
        assert result.spanner.vertices == (4,)
        assert result.spanner.number_of_edges() == 0

    def test_invalid_epsilon(self, grid3):
        with pytest.raises(InputError):
            build_subset_spanner(grid3, [0, 8], SeparatorOracle(grid3), 0.5)

    def test_calibration_queries(self, grid4):
        metric = metric_completion(grid4, grid4.vertices)
        buckets = bucket_edges(metric, 0.05)
        queries = calibration_queries(metric, buckets, 0.05, 5, seed=3)
        assert len(queries) == 5
        assert queries == calibration_queries(metric, buckets, 0.05, 5, seed=3)
        single = metric_completion(grid4, [0])
        assert calibration_queries(single, bucket_edges(single, 0.05), 0.05, 5) == []


class TestConverse:
    def test_close_components(self, path_graph):
        assert close_components(path_graph, [0, 2, 4], 4.0) == [(0, 2, 4)]
        assert close_components(path_graph, [0, 2, 4], 3.9) == [(0,), (2,), (4,)]

    def test_delegation(self, path_graph):
        calls = []

        def algorithm(graph, terminals, epsilon):
            calls.append(tuple(terminals))
            return graph

        query = OracleQuery((0, 2, 4), 4.0, 0.5)
        output = oracle_from_subset_spanner(algorithm, path_graph, query)
        assert calls == [(0, 2, 4)]
        assert output == path_graph
        calls.clear()
        query = OracleQuery((0, 2, 4), 3.0, 0.5)
        output = oracle_from_subset_spanner(algorithm, path_graph, query)
        assert calls == []
        assert output.vertices == (0, 2, 4)

    def test_subset_oracle_window(self, grid3):
        oracle = SubsetSpannerOracle.from_graph(grid3)
        query = OracleQuery(grid3.vertices, 3.0, 0.5)
        output = oracle.query(query)
        assert window_violations(output, oracle.distance, query) == []
        assert oracle.lightness and all(value >= 1.0 for value in oracle.lightness)
