import json

import pytest

from spanner_forge.cli import (
    EXIT_INPUT,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VERIFY,
    main,
)

from fixtures import clean_settings

TRIANGLE = {
    "vertices": 3,
    "edges": [[0, 1, 1.0], [1, 2, 1.0], [0, 2, 1.0]],
    "terminals": [0, 1, 2],
}


@pytest.fixture()
def triangle_file(tmp_path):
    path = tmp_path / "triangle.json"
    path.write_text(json.dumps(TRIANGLE), encoding="utf-8")
    yield path


@pytest.fixture()
def grid_file(tmp_path, clean_settings):
    path = tmp_path / "grid.json"
    args = ["gen", "grid", "--rows", "3", "--cols", "3", "--terminals", "4"]
    assert main(args + ["--seed", "1", "--out", str(path)]) == EXIT_OK
    yield path


def test_gen_writes_graph_json(grid_file):
    data = json.loads(grid_file.read_text())
    assert data["vertices"] == 9
    assert len(data["edges"]) == 12
    assert len(data["terminals"]) == 4


def test_gen_to_stdout_is_reproducible(capsys):
    assert main(["gen", "tree", "-n", "6", "--seed", "3"]) == EXIT_OK
    first = capsys.readouterr().out
    assert main(["gen", "tree", "-n", "6", "--seed", "3"]) == EXIT_OK
    assert capsys.readouterr().out == first
    assert len(json.loads(first)["edges"]) == 5


def test_verify_identity(triangle_file, capsys):
    code = main(["verify", str(triangle_file), str(triangle_file)])
    assert code == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["kind"] == "verify"
    assert report["schema"] == 1
    assert report["stretch"]["max_stretch"] == 1.0
    assert report["stretch"]["passed"] is True
    assert report["lightness"] == 1.5


def test_verify_violation(triangle_file, tmp_path, capsys):
    path = tmp_path / "candidate.json"
    path.write_text(
        json.dumps({"vertices": 3, "edges": [[0, 1, 1.0], [1, 2, 1.0]]}),
        encoding="utf-8",
    )
    assert main(["verify", str(triangle_file), str(path)]) == EXIT_VERIFY
    report = json.loads(capsys.readouterr().out)
    assert report["stretch"]["max_stretch"] == 2.0
    assert report["stretch"]["violations"] == [[0, 2]]
    args = ["verify", str(triangle_file), str(path), "--bound", "2"]
    assert main(args) == EXIT_OK


def test_verify_csv(triangle_file, capsys):
    args = ["verify", str(triangle_file), str(triangle_file), "--format", "csv"]
    assert main(args) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("pair,")
    assert len(lines) == 4


def test_tsp_triangle(triangle_file, capsys):
    assert main(["tsp", str(triangle_file), "--check"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["kind"] == "tsp"
    assert report["weight"] == 3.0
    assert report["held_karp"] == 3.0
    assert report["width"] == 2


def test_tsp_dot(triangle_file, tmp_path):
    out = tmp_path / "tour.dot"
    args = ["tsp", str(triangle_file), "--format", "dot", "--out", str(out)]
    assert main(args) == EXIT_OK
    text = out.read_text()
    assert text.startswith("graph spanner {")
    assert text.count(" -- ") == 3


def test_spanner_report(grid_file, tmp_path, capsys):
    out = tmp_path / "spanner.json"
    assert main(["spanner", str(grid_file), "--out", str(out)]) == EXIT_OK
    report = json.loads(out.read_text())
    diagnostics = report["diagnostics"]
    assert report["kind"] == "spanner"
    assert diagnostics["max_stretch"] <= diagnostics["stretch_bound"]
    assert main(["verify", str(grid_file), str(out)]) in (EXIT_OK, EXIT_VERIFY)
    verified = json.loads(capsys.readouterr().out)
    assert verified["weight"] == pytest.approx(diagnostics["weight"])


def test_spanner_then_verify_keeps_weights(tmp_path, capsys, clean_settings):
    graph_path = tmp_path / "geometric.json"
    spanner_path = tmp_path / "spanner.json"
    args = ["gen", "random-geometric", "-n", "20", "--terminals", "5", "--seed", "0"]
    assert main(args + ["--out", str(graph_path)]) == EXIT_OK
    args = ["spanner", str(graph_path), "--out", str(spanner_path)]
    assert main(args) == EXIT_OK
    graph_edges = {
        (u, v): w for u, v, w in json.loads(graph_path.read_text())["edges"]
    }
    report = json.loads(spanner_path.read_text())
    for u, v, w in report["spanner"]["edges"]:
        assert graph_edges[(u, v)] == w
    bound = report["diagnostics"]["stretch_bound"]
    args = ["verify", str(graph_path), str(spanner_path), "--bound", str(bound)]
    assert main(args) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["stretch"]["passed"] is True


def test_oracle_window(grid_file, capsys):
    assert main(["oracle", str(grid_file), "--scale", "2"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["window_violations"] == []
    assert report["scale"] == 2.0


def test_batch_has_no_dot(clean_settings):
    args = ["batch", "grid", "--rows", "2", "--cols", "2", "--count", "1"]
    assert main(args + ["--format", "dot"]) == EXIT_USAGE


def test_unknown_flag():
    assert main(["verify", "--frobnicate"]) == EXIT_USAGE


def test_missing_file(tmp_path):
    assert main(["tsp", str(tmp_path / "absent.json")]) == EXIT_USAGE


def test_invalid_input(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"vertices": 2, "edges": [[0, 5, 1.0]]}', encoding="utf-8")
    assert main(["tsp", str(path)]) == EXIT_INPUT
    assert "outside 0..1" in capsys.readouterr().err
