import json

import networkx as nx
import numpy as np
import pytest

from spanner_forge import __version__
from spanner_forge.bench import (
    InstanceSpec,
    dumps_report,
    dumps_rows,
    generate,
    make_oracle,
    make_report,
    report_rows,
    rounded,
    run_batch,
    run_instance,
    select_terminals,
    summarize,
)
from spanner_forge.exceptions import InputError
from spanner_forge.oracles import SeparatorOracle
from spanner_forge.subset import SubsetSpannerOracle

from fixtures import clean_settings, grid3


class TestGenerators:
    def test_grid(self):
        generated = generate(InstanceSpec("grid", {"rows": 3, "cols": 3}))
        instance = generated.instance
        assert instance.graph.number_of_edges() == 12
        assert instance.terminals == tuple(range(9))
        assert generated.points is None

    def test_tree(self):
        graph = generate(InstanceSpec("tree", {"n": 10}, seed=4)).instance.graph
        assert graph.number_of_edges() == 9
        assert nx.is_tree(graph.nx_graph)

    def test_path_plus_clique(self):
        graph = generate(InstanceSpec("path-plus-clique", {"n": 9})).instance.graph
        assert graph.number_of_edges() == 9

    def test_random_geometric_is_connected(self):
        spec = InstanceSpec("random-geometric", {"n": 20}, seed=3, terminals=5)
        instance = generate(spec).instance
        assert instance.graph.is_connected()
        assert len(instance.terminals) == 5

    def test_same_seed_same_bytes(self):
        spec = InstanceSpec("doubling-grid", {"rows": 3, "cols": 4}, seed=7)
        assert generate(spec).dumps() == generate(spec).dumps()
        other = InstanceSpec("doubling-grid", {"rows": 3, "cols": 4}, seed=8)
        assert generate(spec).dumps() != generate(other).dumps()

    def test_points(self, tmp_path):
        generated = generate(InstanceSpec("euclidean-points", {"n": 6}, seed=1))
        assert len(generated.points) == 6
        assert generated.graph_instance.graph.number_of_edges() == 15
        path = tmp_path / "points.csv"
        generated.write(path)
        assert len(path.read_text().splitlines()) == 6

    def test_unknown_family(self):
        with pytest.raises(InputError, match="Unknown family"):
            generate(InstanceSpec("hypercube"))

    def test_missing_size(self):
        with pytest.raises(InputError, match="Missing size parameter 'rows'"):
            generate(InstanceSpec("grid", {"cols": 3}))

    def test_unknown_rule(self):
        spec = InstanceSpec("grid", {"rows": 2, "cols": 2}, terminals=2, rule="edge")
        with pytest.raises(InputError, match="Unknown terminal rule"):
            generate(spec)

    def test_select_terminals(self):
        rng = np.random.default_rng(0)
        vertices = tuple(range(10))
        assert select_terminals(vertices, 3, "spread", rng) == (0, 3, 6)
        assert select_terminals(vertices, 3, "all", rng) == vertices
        chosen = select_terminals(vertices, 4, "random", rng)
        assert len(set(chosen)) == 4
        assert list(chosen) == sorted(chosen)
        with pytest.raises(InputError, match="Cannot pick 11"):
            select_terminals(vertices, 11, "random", rng)


class TestReports:
    def test_rounded(self):
        value = {
            "inf": float("inf"),
            "nan": float("nan"),
            "long": 1.23456789012,
            "array": np.array([0.1]),
            "set": {2, 1},
            "flag": np.bool_(True),
            "neg_zero": -0.0,
            1: np.int64(3),
        }
        assert rounded(value) == {
            "inf": None,
            "nan": None,
            "long": 1.23456789,
            "array": [0.1],
            "set": [1, 2],
            "flag": True,
            "neg_zero": 0.0,
            "1": 3,
        }

    def test_envelope(self):
        report = make_report("verify", {"weight": 2.0})
        assert report == {
            "schema": 1,
            "kind": "verify",
            "version": __version__,
            "weight": 2.0,
        }

    def test_dumps_report_is_sorted_json(self):
        text = dumps_report({"b": float("inf"), "a": 1})
        assert text.endswith("\n")
        assert list(json.loads(text)) == ["a", "b"]
        assert json.loads(text)["b"] is None

    def test_dumps_report_keeps_graph_weights(self):
        weight = 0.13210902950747233
        report = {"weight": weight, "spanner": {"edges": [[0, 7, weight]]}}
        data = json.loads(dumps_report(report))
        assert data["weight"] == 0.13210903
        assert data["spanner"]["edges"] == [[0, 7, weight]]

    def test_dumps_rows(self):
        text = dumps_rows([{"a": 1, "b": [1, 2]}, {"a": 2, "c": 0.5}])
        assert text == 'a,b,c\n1,"[1, 2]",\n2,,0.5\n'

    def test_report_rows(self):
        nested = {"stretch": {"per_pair": [{"pair": [0, 1], "ratio": 1.0}]}}
        assert report_rows(nested) == [{"pair": [0, 1], "ratio": 1.0}]
        assert report_rows({"kind": "tsp", "edges": [[0, 1, 2]]}) == [
            {"kind": "tsp"}
        ]


class TestBatch:
    def test_make_oracle(self, grid3):
        assert isinstance(make_oracle("separator", grid3), SeparatorOracle)
        assert isinstance(make_oracle("subset", grid3), SubsetSpannerOracle)
        with pytest.raises(InputError, match="Unknown oracle"):
            make_oracle("planar", grid3)

    def test_failed_instance_is_reported(self):
        entry = run_instance(InstanceSpec("hypercube"), 0.5)
        assert not entry.passed
        assert entry.error.startswith("InputError")
        assert entry.as_dict()["family"] == "hypercube"

    def test_batch_keeps_order(self, clean_settings):
        specs = [
            InstanceSpec("grid", {"rows": 3, "cols": 3}, seed=seed, terminals=4)
            for seed in (2, 0, 1)
        ]
        entries = run_batch(specs, 0.5, threads=2)
        assert [entry.spec.seed for entry in entries] == [2, 0, 1]
        assert all(entry.passed for entry in entries)
        summary = summarize(entries)
        assert summary["count"] == 3
        assert summary["failed"] == 0
        assert summary["max_stretch"] >= 1.0
        assert [row["seed"] for row in summary["instances"]] == [2, 0, 1]

    def test_empty_batch(self):
        assert run_batch([], 0.5) == []
        assert summarize([])["max_stretch"] is None
