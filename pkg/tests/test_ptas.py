import pytest

from spanner_forge.exceptions import InputError
from spanner_forge.ptas import (
    PARTITIONER_CLASS_BY_NAME,
    BfsLayerPartitioner,
    GreedyWeightPartitioner,
    choose_parts,
    contract_edges,
    match_odd_vertices,
    run_ptas,
)
from spanner_forge.treewidth import check_tour

from fixtures import clean_settings, grid3, grid4, path_graph, star_tree, triangle


class TestPartitioners:
    def test_registry(self):
        assert PARTITIONER_CLASS_BY_NAME["bfs-layer"] is BfsLayerPartitioner
        assert PARTITIONER_CLASS_BY_NAME["greedy"] is GreedyWeightPartitioner

    @pytest.mark.parametrize("cls", [BfsLayerPartitioner, GreedyWeightPartitioner])
    def test_single_part_holds_everything(self, grid3, cls):
        partition = cls()(grid3, 1)
        assert partition.non_empty == 1
        assert partition.weight == pytest.approx(grid3.total_weight)

    def test_greedy_many_parts(self, grid3):
        partition = GreedyWeightPartitioner()(grid3, 20)
        assert partition.non_empty == 12
        assert len(partition.parts) == 20
        assert partition.weight == pytest.approx(1.0)

    def test_bfs_layers(self, grid3):
        partition = BfsLayerPartitioner()(grid3, 2)
        assert partition.chosen == 0
        assert partition.parts[0] == (
            (0, 1),
            (0, 3),
            (2, 5),
            (4, 5),
            (4, 7),
            (6, 7),
        )
        assert partition.weights == (6.0, 6.0)
        assert partition.as_dict()["method"] == "bfs-layer"

    def test_chosen_part_below_average(self, grid4):
        for g in (2, 3, 5):
            partition = BfsLayerPartitioner()(grid4, g)
            assert partition.weight <= grid4.total_weight / partition.non_empty
            partition.check(grid4)

    def test_needs_a_part(self, grid3):
        with pytest.raises(InputError, match="at least one part"):
            BfsLayerPartitioner()(grid3, 0)


class TestContraction:
    def test_contract_path_edge(self, path_graph):
        contraction = contract_edges(path_graph, [(2, 1)], (1, 2, 4))
        assert contraction.terminals == (1, 4)
        assert contraction.redesignations == ((1, (1, 2)),)
        assert contraction.members(1) == (1, 2)
        assert contraction.origin[(1, 3)] == (2, 3)
        assert sorted(contraction.graph.edges()) == [
            (0, 1, 2.0),
            (1, 3, 1.0),
            (3, 4, 3.0),
        ]

    def test_keeps_lightest_parallel_edge(self, triangle):
        contraction = contract_edges(triangle, [(0, 1)], ())
        assert contraction.graph.number_of_edges() == 1
        assert contraction.origin[(0, 2)] == (0, 2)

    def test_unknown_edge(self, path_graph):
        with pytest.raises(InputError, match="does not exist"):
            contract_edges(path_graph, [(0, 4)], ())


class TestPipelineHelpers:
    def test_choose_parts(self):
        assert choose_parts(10.0, 0.5, 4.0) == 5
        assert choose_parts(1.0, 0.5, 10.0) == 1
        assert choose_parts(10.0, 0.5, 0.0) == 1

    def test_exact_matching(self, path_graph):
        pairs, kind = match_odd_vertices(path_graph, [4, 0, 3, 1])
        assert kind == "exact"
        assert pairs == [(0, 1), (3, 4)]

    def test_greedy_matching(self, path_graph):
        pairs, kind = match_odd_vertices(path_graph, [0, 1, 3, 4], exact_cap=2)
        assert kind == "greedy"
        assert sorted(pairs) == [(0, 1), (3, 4)]

    def test_nothing_to_match(self, path_graph):
        assert match_odd_vertices(path_graph, []) == ([], "none")


class TestRunPtas:
    @pytest.mark.parametrize("epsilon", [0.0, 1.0, 1.5])
    def test_epsilon_range(self, triangle, epsilon):
        with pytest.raises(InputError):
            run_ptas(triangle, (0, 1), epsilon)

    def test_single_terminal(self, triangle):
        result = run_ptas(triangle, (2,), 0.5)
        assert result.weight == 0.0
        assert result.edges == ()
        assert result.report.lower_bound_kind == "trivial"

    def test_tree_without_contraction(self, star_tree, clean_settings):
        result = run_ptas(star_tree, (1, 2, 4), 0.5, g=1)
        assert result.weight == pytest.approx(14.0)
        assert result.report.g == 1
        assert result.report.ratio == pytest.approx(1.0)

    @pytest.mark.parametrize("cls", [BfsLayerPartitioner, GreedyWeightPartitioner])
    def test_grid_tour_is_valid(self, grid4, cls, clean_settings):
        terminals = (0, 3, 5, 10, 12, 15)
        result = run_ptas(grid4, terminals, 0.5, partitioner=cls(), g=3)
        check_tour(result.edges, terminals)
        assert result.spanner.is_subgraph_of(grid4)
        report = result.report
        assert report.lower_bound_kind == "held-karp"
        assert report.ratio >= 1 - 1e-9
        assert report.tour_weight == pytest.approx(result.weight)
        assert report.partition["g"] == 3
        assert set(result.as_dict()) == {"weight", "edges", "report"}
