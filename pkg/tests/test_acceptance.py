import json
import math

import numpy as np
import pytest

from spanner_forge.bench import InstanceSpec, generate
from spanner_forge.cli import EXIT_OK, main
from spanner_forge.graph import (
    metric_completion,
    shortest_path,
    shortest_paths,
    verify_stretch,
    within_tolerance,
)
from spanner_forge.oracles import (
    CorrelationOracle,
    DoublingOracle,
    EuclideanOracle,
    MinorOracle,
    OracleQuery,
    PointSet,
    SeparatorOracle,
    close_pair_paths,
    measure_sparsity,
)
from spanner_forge.ptas import run_ptas
from spanner_forge.separators import (
    EllCloseStats,
    ShortestPathTreeProvider,
    TreeCentroidProvider,
    ell_close_spanner,
    ss_spanner,
)
from spanner_forge.subset import SubsetSpannerOracle, build_subset_spanner
from spanner_forge.subset.hierarchy import safety_factor
from spanner_forge.treewidth import (
    check_tour,
    held_karp,
    held_karp_matrix,
    subset_tsp_dp,
)
from spanner_forge.treewidth.partitions import (
    WeightedPartition,
    reduce_representatives,
    represents,
    set_partitions,
)

from fixtures import clean_settings, window_violations
from test_treewidth import brute_force_tour

pytestmark = pytest.mark.slow

EPSILONS = (0.03, 0.02, 0.01)


def torus_king_grid(size):
    """All cells of a ``size x size`` torus under the wrap-around max metric."""
    cells = np.array([(r, c) for r in range(size) for c in range(size)])
    diff = np.abs(cells[:, None, :] - cells[None, :, :])
    gap = np.minimum(diff, size - diff)
    return PointSet(matrix=gap.max(axis=-1).astype(float))


def graph_oracle(cls):
    def build(seed):
        spec = InstanceSpec("doubling-grid", {"rows": 6, "cols": 6}, seed=seed)
        graph = generate(spec).instance.graph
        return cls.from_graph(graph), graph.vertices, (2.0, 10.0)

    return build


def euclidean_oracle(seed):
    rng = np.random.default_rng(seed)
    points = PointSet(coordinates=rng.random((40, 2)))
    return EuclideanOracle(points), points.labels, (0.1, 0.8)


ORACLE_BUILDERS = {
    "euclidean": euclidean_oracle,
    "doubling": graph_oracle(DoublingOracle),
    "correlation": graph_oracle(CorrelationOracle),
    "minor": graph_oracle(MinorOracle),
    "separator": graph_oracle(SeparatorOracle),
}


@pytest.mark.parametrize("seed", range(100))
def test_stretch_soundness(seed, clean_settings):
    spec = InstanceSpec("random-geometric", {"n": 80}, seed=seed, terminals=12)
    instance = generate(spec).instance
    epsilon = EPSILONS[seed % 3]
    result = build_subset_spanner(
        instance.graph,
        instance.terminals,
        SeparatorOracle(instance.graph),
        epsilon,
    )
    bound = 1 + safety_factor(29) * epsilon
    report = verify_stretch(result.spanner, instance.graph, instance.terminals, bound)
    assert report.passed
    assert result.diagnostics["repairs"] == 0
    assert result.diagnostics["deferred_credit"] == 0
    assert result.diagnostics["credit_topups"] == 0
    for hierarchy in result.hierarchies.values():
        hierarchy.ledger.check_conservation()


@pytest.mark.parametrize("seed", range(50))
def test_single_source_constants(seed):
    spec = InstanceSpec("random-geometric", {"n": 30}, seed=seed)
    graph = generate(spec).instance.graph
    rng = np.random.default_rng(seed)
    for _ in range(10):
        a, b, source = (int(v) for v in rng.choice(30, size=3, replace=False))
        epsilon = float(rng.choice([0.1, 0.25, 0.5, 0.9]))
        anchored = ss_spanner(graph, shortest_path(graph, a, b), source, epsilon)
        assert anchored.bound_violations(epsilon) == []
        in_graph, _ = shortest_paths(graph, source)
        kept = anchored.as_graph(graph, with_base_path=True)
        in_kept, _ = shortest_paths(kept, source)
        for vertex in anchored.base_path:
            bound = (1 + epsilon) * in_graph[vertex]
            assert within_tolerance(in_kept[vertex], bound)


@pytest.mark.parametrize("name", sorted(ORACLE_BUILDERS))
def test_oracle_window_contract(name):
    rng = np.random.default_rng(11)
    for seed in range(10):
        oracle, labels, (low, high) = ORACLE_BUILDERS[name](seed)
        queries = []
        for _ in range(20):
            size = int(rng.integers(2, 13))
            chosen = rng.choice(len(labels), size=size, replace=False)
            terminals = tuple(labels[i] for i in sorted(chosen))
            scale = float(rng.uniform(low, high))
            epsilon = float(rng.uniform(0.05, 0.5))
            queries.append(OracleQuery(terminals, scale, epsilon))
        for query in queries:
            output = oracle.query(query)
            assert set(query.terminals) <= set(output.vertices)
            assert window_violations(output, oracle.distance, query) == []
            assert all(w <= 2 * query.scale * (1 + 1e-9) for _, _, w in output.edges())
        sparsity = measure_sparsity(oracle, queries, threads=1)
        for stats in sparsity.per_query:
            assert stats.weak_ratio <= 2 * stats.strong_ratio * (1 + 1e-9)


def test_doubling_sparsity_scaling():
    # nets of the torus are the lattices 2Z^2 and 3Z^2 for these radii
    ratios = {}
    for size in (12, 18, 24):
        space = torus_king_grid(size)
        oracle = DoublingOracle(space, net_divisor=0.2)
        for epsilon in (0.1, 0.2):
            query = OracleQuery(space.labels, 2.0, epsilon)
            sparsity = measure_sparsity(oracle, [query], threads=1)
            ratios[size, epsilon] = sparsity.strong_ratio
    for size in (12, 18, 24):
        assert ratios[size, 0.1] == pytest.approx(3.75)
        assert ratios[size, 0.2] == pytest.approx(4 / 3)
        assert 2.5 <= ratios[size, 0.1] / ratios[size, 0.2] <= 6
    for epsilon in (0.1, 0.2):
        row = [ratios[size, epsilon] for size in (12, 18, 24)]
        assert max(row) <= 1.2 * min(row)


@pytest.mark.parametrize("seed", range(10))
def test_centroid_depth_on_trees(seed):
    spec = InstanceSpec("tree", {"n": 60}, seed=seed, terminals=15)
    instance = generate(spec).instance
    tree, terminals = instance.graph, instance.terminals
    ell = float(np.random.default_rng(seed).uniform(5.0, 40.0))
    demands = close_pair_paths(tree, terminals, ell)
    stats = EllCloseStats()
    spanner = ell_close_spanner(
        tree,
        terminals,
        demands,
        ell,
        0.25,
        separator_provider=TreeCentroidProvider(),
        stats=stats,
    )
    for demand in demands:
        reached, _ = shortest_paths(spanner, demand[0])
        assert within_tolerance(reached[demand[-1]], tree.path_weight(demand))
    assert stats.max_depth <= math.ceil(math.log2(len(tree))) + 1


def test_shortest_path_tree_weight_on_grids():
    ell, epsilon = 3.0, 0.25
    ratios = []
    for side in (6, 8, 10):
        grid = generate(InstanceSpec("grid", {"rows": side, "cols": side})).instance
        graph = grid.graph
        terminals = graph.vertices
        demands = close_pair_paths(graph, terminals, ell)
        spanner = ell_close_spanner(
            graph,
            terminals,
            demands,
            ell,
            epsilon,
            separator_provider=ShortestPathTreeProvider(),
        )
        for demand in demands:
            reached, _ = shortest_paths(spanner, demand[0])
            bound = (1 + epsilon) * graph.path_weight(demand)
            assert within_tolerance(reached[demand[-1]], bound)
        # adjacent terminals force every grid edge
        assert spanner.total_weight == 2 * side * (side - 1)
        n = len(graph)
        ratios.append(spanner.total_weight / (n * ell * math.log2(n)))
    mean = sum(ratios) / len(ratios)
    assert all(0.5 * mean <= ratio <= 1.5 * mean for ratio in ratios)


@pytest.mark.parametrize("seed", range(50))
def test_dp_exactness(seed):
    rng = np.random.default_rng(seed)
    family = ("random-geometric", "doubling-grid", "tree")[seed % 3]
    size = {"rows": 3, "cols": 4} if family == "doubling-grid" else {"n": 12}
    spec = InstanceSpec(family, size, seed=seed)
    graph = generate(spec).instance.graph
    k = int(rng.integers(2, 8))
    terminals = tuple(sorted(rng.choice(len(graph), size=k, replace=False).tolist()))
    result = subset_tsp_dp(graph, terminals)
    check_tour(result.edges, terminals)
    reference = held_karp(graph, terminals)
    assert result.weight == pytest.approx(reference, rel=1e-9)
    dist = metric_completion(graph, terminals).dist
    assert held_karp_matrix(dist) == pytest.approx(brute_force_tour(dist))


@pytest.mark.parametrize("size", [3, 4, 5, 6])
def test_representative_sets(size):
    rng = np.random.default_rng(size)
    partitions = list(set_partitions(range(size)))
    for _ in range(50):
        count = int(rng.integers(1, min(len(partitions), 60) + 1))
        chosen = rng.choice(len(partitions), size=count, replace=False)
        group = [
            WeightedPartition(partitions[i], float(rng.integers(0, 20)))
            for i in chosen
        ]
        kept = reduce_representatives(group, range(size))
        assert len(kept) <= 2 ** (size - 1)
        assert represents(kept, group, range(size))


def test_converse_sparsity():
    spec = InstanceSpec("doubling-grid", {"rows": 5, "cols": 5}, seed=2)
    graph = generate(spec).instance.graph
    oracle = SubsetSpannerOracle.from_graph(graph)
    rng = np.random.default_rng(5)
    queries = []
    for _ in range(50):
        terminals = tuple(sorted(rng.choice(25, size=8, replace=False).tolist()))
        queries.append(OracleQuery(terminals, float(rng.uniform(1.5, 6.0)), 0.5))
    sparsity = measure_sparsity(oracle, queries, threads=1)
    assert oracle.lightness
    assert sparsity.weak_ratio <= max(oracle.lightness) * (1 + 1e-9)


@pytest.mark.parametrize("seed", range(20))
def test_pipeline_feasibility(seed, clean_settings):
    spec = InstanceSpec("grid", {"rows": 4, "cols": 5}, seed=seed, terminals=6)
    instance = generate(spec).instance
    result = run_ptas(instance.graph, instance.terminals, 0.5)
    check_tour(result.edges, instance.terminals)
    assert result.weight >= held_karp(instance.graph, instance.terminals) - 1e-9


def test_spanner_then_verify(tmp_path, capsys, clean_settings):
    for seed in range(20):
        graph_path = tmp_path / f"graph{seed}.json"
        spanner_path = tmp_path / f"spanner{seed}.json"
        args = ["gen", "random-geometric", "-n", "40", "--terminals", "8"]
        assert main(args + ["--seed", str(seed), "--out", str(graph_path)]) == 0
        args = ["spanner", str(graph_path), "--eps", "0.5", "--out", str(spanner_path)]
        assert main(args) == EXIT_OK
        bound = json.loads(spanner_path.read_text())["diagnostics"]["stretch_bound"]
        args = ["verify", str(graph_path), str(spanner_path), "--bound", str(bound)]
        assert main(args) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["stretch"]["passed"] is True
