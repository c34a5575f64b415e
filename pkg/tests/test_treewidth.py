import itertools

import numpy as np
import pytest

from spanner_forge.bench.generators import doubling_grid, random_tree
from spanner_forge.exceptions import (
    CapacityError,
    InfeasibleError,
    InputError,
    InvariantViolation,
)
from spanner_forge.graph import WeightedGraph, metric_completion
from spanner_forge.treewidth import (
    TreeDecomposition,
    check_tour,
    dumps_pace_td,
    held_karp,
    held_karp_matrix,
    heuristic_decomposition,
    loads_pace_td,
    make_nice,
    read_pace_td,
    subset_tsp_dp,
    write_pace_td,
)
from spanner_forge.treewidth.decomposition import (
    FORGET,
    INTRODUCE_EDGE,
    INTRODUCE_VERTEX,
    JOIN,
    LEAF,
)
from spanner_forge.treewidth.partitions import (
    WeightedPartition,
    canonical_partition,
    consistent_cuts,
    join_partitions,
    merge_elements,
    reduce_representatives,
    remove_element,
    represents,
    set_partitions,
)

from fixtures import grid3, path_graph, star_tree, triangle


def brute_force_tour(dist):
    k = len(dist)
    if k <= 1:
        return 0.0
    best = np.inf
    for order in itertools.permutations(range(1, k)):
        cycle = (0,) + order + (0,)
        best = min(best, sum(dist[a][b] for a, b in zip(cycle, cycle[1:])))
    return best


class TestDecomposition:
    def test_single_bag_nice_triangle(self, triangle):
        td = TreeDecomposition({0: frozenset({0, 1, 2})})
        nice = make_nice(td, triangle)
        assert len(nice.nodes) == 10
        assert nice.count(LEAF) == 1
        assert nice.count(INTRODUCE_VERTEX) == 3
        assert nice.count(INTRODUCE_EDGE) == 3
        assert nice.count(FORGET) == 3
        assert nice.count(JOIN) == 0
        assert nice.width == 2
        assert nice.nodes[nice.root].bag == frozenset()

    @pytest.mark.parametrize("method", ["min-degree", "min-fill"])
    def test_heuristic_is_valid(self, grid3, method):
        td = heuristic_decomposition(grid3, method)
        td.validate(grid3)
        nice = make_nice(td, grid3)
        nice.check(grid3)
        assert nice.width == td.width

    def test_tree_has_width_one(self, star_tree):
        assert heuristic_decomposition(star_tree).width == 1

    def test_unknown_heuristic(self, triangle):
        with pytest.raises(InputError, match="Unknown decomposition heuristic"):
            heuristic_decomposition(triangle, "max-degree")

    def test_validate_errors(self, triangle):
        with pytest.raises(InputError, match="Vertex coverage violated"):
            TreeDecomposition({0: frozenset({0, 1})}).validate(triangle)
        with pytest.raises(InputError, match="Edge coverage violated"):
            TreeDecomposition(
                {0: frozenset({0, 1}), 1: frozenset({1, 2})}, ((0, 1),)
            ).validate(triangle)
        with pytest.raises(InputError, match="Tree axiom violated"):
            TreeDecomposition(
                {0: frozenset({0, 1, 2}), 1: frozenset({0})}
            ).validate(triangle)

    def test_validate_connectivity(self, path_graph):
        bags = {
            0: frozenset({0, 1}),
            1: frozenset({1, 2, 3}),
            2: frozenset({3, 4, 0}),
        }
        td = TreeDecomposition(bags, ((0, 1), (1, 2)))
        with pytest.raises(InputError, match="Connectivity violated"):
            td.validate(path_graph)

    def test_nice_check_rejects_tampering(self, triangle):
        nice = make_nice(TreeDecomposition({0: frozenset({0, 1, 2})}), triangle)
        graph = WeightedGraph([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (2, 3, 1.0)])
        with pytest.raises(InvariantViolation):
            nice.check(graph)

    def test_pace_round_trip(self, grid3, tmp_path):
        td = heuristic_decomposition(grid3)
        path = tmp_path / "grid.td"
        write_pace_td(td, len(grid3), path)
        assert read_pace_td(path) == td
        text = dumps_pace_td(td, len(grid3))
        assert text.startswith(f"s td {len(td.bags)} {td.width + 1} 9")

    def test_pace_one_based(self):
        td = loads_pace_td("c comment\ns td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n")
        assert td.bags == {1: frozenset({0, 1}), 2: frozenset({1, 2})}
        assert td.edges == ((1, 2),)

    @pytest.mark.parametrize(
        "text, message",
        [
            ("b 1 1 2\n", "Missing 's td' header"),
            ("s td 2 2 3\nb 1 1 2\n", "announces 2 bags"),
            ("s td 1 2 3\nb x 1\n", "Malformed .td line 2"),
        ],
    )
    def test_pace_errors(self, text, message):
        with pytest.raises(InputError, match=message):
            loads_pace_td(text)

    def test_read_missing_file(self, tmp_path):
        with pytest.raises(InputError, match="Cannot read"):
            read_pace_td(tmp_path / "absent.td")


class TestPartitions:
    def test_canonical_form(self):
        assert canonical_partition([[3, 1], [2]]) == ((1, 3), (2,))

    def test_canonical_errors(self):
        with pytest.raises(InputError, match="empty blocks"):
            canonical_partition([[1], []])
        with pytest.raises(InputError, match="not disjoint"):
            canonical_partition([[1, 2], [2, 3]])

    def test_join(self):
        alpha = ((1, 2), (3,), (4,))
        beta = ((1,), (2, 3), (4,))
        assert join_partitions(alpha, beta) == ((1, 2, 3), (4,))
        assert join_partitions(alpha, ((1, 2, 3, 4),)) == ((1, 2, 3, 4),)

    def test_join_needs_same_ground(self):
        with pytest.raises(InputError, match="different ground sets"):
            join_partitions(((1,),), ((2,),))

    def test_merge_and_remove(self):
        assert merge_elements(((1,), (2,), (3,)), 1, 3) == ((1, 3), (2,))
        assert remove_element(((1, 3), (2,)), 2) == ((1, 3),)
        assert remove_element(((1, 3), (2,)), 3) == ((1,), (2,))

    def test_bell_numbers(self):
        counts = [len(set(set_partitions(range(n)))) for n in range(6)]
        assert counts == [1, 1, 2, 5, 15, 52]

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_cut_count(self, n):
        cuts = consistent_cuts(range(n))
        assert len(cuts) == 2 ** (n - 1)
        assert all(0 in cut for cut in cuts)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_rank_reduction_represents(self, n):
        rng = np.random.default_rng(n)
        entries = [
            WeightedPartition(partition, float(rng.integers(1, 10)))
            for partition in set_partitions(range(n))
        ]
        kept = reduce_representatives(entries, range(n))
        assert len(kept) <= 2 ** (n - 1)
        assert represents(kept, entries, range(n))

    def test_keep_all_only_deduplicates(self):
        entries = [
            WeightedPartition(((0, 1),), 3.0),
            WeightedPartition(((0, 1),), 2.0),
            WeightedPartition(((0,), (1,)), 1.0),
        ]
        kept = reduce_representatives(entries, mode="keep-all")
        assert [entry.weight for entry in kept] == [1.0, 2.0]

    def test_unknown_mode(self):
        entries = [
            WeightedPartition(((0, 1),), 1.0),
            WeightedPartition(((0,), (1,)), 1.0),
        ]
        with pytest.raises(InputError, match="Unknown reduction mode"):
            reduce_representatives(entries, mode="greedy")


class TestHeldKarp:
    def test_small_counts(self):
        assert held_karp_matrix(np.zeros((1, 1))) == 0.0
        assert held_karp_matrix(np.array([[0.0, 3.0], [3.0, 0.0]])) == 6.0

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_permutations(self, seed):
        rng = np.random.default_rng(seed)
        points = rng.random((6, 2))
        dist = np.linalg.norm(points[:, None] - points[None, :], axis=-1)
        assert held_karp_matrix(dist) == pytest.approx(brute_force_tour(dist))

    def test_graph_path(self, path_graph):
        assert held_karp(path_graph, (0, 4)) == pytest.approx(16.0)
        assert held_karp(path_graph, (2,)) == 0.0

    def test_cap(self, grid3):
        with pytest.raises(CapacityError, match="cap 3"):
            held_karp(grid3, range(5), cap=3)


class TestSubsetTspDp:
    def test_triangle(self, triangle):
        result = subset_tsp_dp(triangle, (0, 1, 2))
        assert result.weight == pytest.approx(3.0)
        check_tour(result.edges, (0, 1, 2))

    def test_path_goes_and_returns(self):
        graph = WeightedGraph([(0, 1, 2.0), (1, 2, 3.0)])
        result = subset_tsp_dp(graph, (0, 2))
        assert result.weight == pytest.approx(10.0)
        assert result.edges == ((0, 1, 2), (1, 2, 2))
        assert result.as_dict() == {"weight": 10.0, "edges": [[0, 1, 2], [1, 2, 2]]}

    def test_tree_doubles_the_steiner_tree(self, star_tree):
        result = subset_tsp_dp(star_tree, (1, 2, 4))
        assert result.weight == pytest.approx(2 * (1 + 2 + 3 + 1))

    def test_trivial_terminal_sets(self, triangle):
        assert subset_tsp_dp(triangle, ()).weight == 0.0
        assert subset_tsp_dp(triangle, (1,)).edges == ()

    def test_disconnected_terminals(self):
        graph = WeightedGraph([(0, 1, 1.0), (2, 3, 1.0)])
        with pytest.raises(InfeasibleError) as info:
            subset_tsp_dp(graph, (0, 3))
        assert info.value.pair == (0, 3)

    def test_unknown_terminal(self, triangle):
        with pytest.raises(InputError):
            subset_tsp_dp(triangle, (0, 9))

    def test_negative_copies(self, triangle):
        with pytest.raises(InputError, match="extra_copies"):
            subset_tsp_dp(triangle, (0, 1), extra_copies=-1)

    def test_decomposition_must_fit(self, triangle):
        with pytest.raises(InputError):
            subset_tsp_dp(
                triangle, (0, 1), TreeDecomposition({0: frozenset({0, 1})})
            )

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_held_karp_on_grids(self, seed):
        rng = np.random.default_rng(seed)
        graph = doubling_grid({"rows": 2, "cols": 4}, rng)
        terminals = tuple(sorted(rng.choice(8, size=4, replace=False).tolist()))
        result = subset_tsp_dp(graph, terminals, verify=True)
        assert result.weight == pytest.approx(held_karp(graph, terminals))
        check_tour(result.edges, terminals)

    @pytest.mark.parametrize("seed", [3, 4])
    def test_matches_held_karp_on_trees(self, seed):
        rng = np.random.default_rng(seed)
        graph = random_tree({"n": 9}, rng)
        terminals = (0, 3, 5, 8)
        result = subset_tsp_dp(graph, terminals)
        metric = metric_completion(graph, terminals)
        assert result.weight == pytest.approx(brute_force_tour(metric.dist))
        assert result.width == 1

    def test_keep_all_agrees_with_rank(self, grid3):
        terminals = (0, 4, 8)
        rank = subset_tsp_dp(grid3, terminals, reduction="rank")
        keep_all = subset_tsp_dp(grid3, terminals, reduction="keep-all")
        assert rank.weight == pytest.approx(keep_all.weight)
        assert rank.weight == pytest.approx(8.0)

    def test_nice_decomposition_accepted(self, triangle):
        nice = make_nice(heuristic_decomposition(triangle), triangle)
        assert subset_tsp_dp(triangle, (0, 2), nice).weight == pytest.approx(2.0)
