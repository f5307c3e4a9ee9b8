import json

import pytest

import main


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("TRIALITY_ALLOW_LARGE", "TRIALITY_MAX_GROUP_ORDER", "TRIALITY_SCAN_CHUNK"):
        monkeypatch.delenv(name, raising=False)


@pytest.mark.parametrize("argv", [
    [],
    ["hexagon"],
    ["hexagon", "--q", "9"],
    ["hexagon", "--q", "5"],
    ["hexagon", "--q", "2", "--mode", "twisted"],
    ["class3", "--q", "6"],
    ["class3", "--q", "7"],
    ["class3", "--q", "2", "--triple", "3"],
    ["class3", "--q", "2", "--triple", "first"],
])
def test_usage_errors(argv):
    assert main.main(argv) == main.EXIT_USAGE


def test_help_exits_cleanly():
    assert main.main(["--help"]) == main.EXIT_OK


def test_hexagon_moving_summary(capsys):
    assert main.main(["hexagon", "--q", "2"]) == main.EXIT_OK
    out = capsys.readouterr().out
    assert "result: 63 points, 252 lines, (5,3,6)" in out
    assert "ok: yes" in out


def test_hexagon_absolute_summary(capsys):
    assert main.main(["hexagon", "--q", "2", "--mode", "absolute"]) == main.EXIT_OK
    assert "result: 63 points, 63 lines, (6,6,6)" in capsys.readouterr().out


def test_hexagon_json_artifact(tmp_path):
    target = tmp_path / "hex.json"
    assert main.main(["hexagon", "--q", "2", "--format", "json", "--output", str(target)]) == main.EXIT_OK
    payload = json.loads(target.read_text())
    assert payload["type"] == "hexagon_moving"
    assert len(payload["lines"]) == 252
    assert payload["metrics"]["summary"]["params"] == "(5,3,6)"


def test_class3_summary(capsys):
    assert main.main(["class3", "--q", "2"]) == main.EXIT_OK
    out = capsys.readouterr().out
    assert "result: 1 triple class; absolute: 3 paths; moving: prism (6v, 9e)" in out


def test_class3_artifacts_are_deterministic(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main.main(["class3", "--q", "2", "--triple", "0", "--format", "json", "--output", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    payload = json.loads(paths[0].read_text())
    assert payload["type"] == "class3_moving"
    (graph,) = payload["graphs"]
    assert len(graph["vertices"]) == 6
    assert len(graph["edges"]) == 9


def test_class3_dot(capsys):
    assert main.main(["class3", "--q", "2", "--format", "dot"]) == main.EXIT_OK
    assert capsys.readouterr().out.startswith('graph "class3_moving_q2_0" {')


@pytest.mark.slow
def test_class3_q4_cli(capsys):
    assert main.main(["class3", "--q", "4"]) == main.EXIT_OK
    assert "30" in capsys.readouterr().out
