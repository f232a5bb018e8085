import json
import os
import tempfile

import pytest

from edsolve.data import generators
from edsolve.data import graph_file
from edsolve.solver import eds_core
from edsolve.solver import solver_config
from edsolve.solver import solver_driver
from edsolve.tools import eds_tool


@pytest.fixture
def tmpdir_path():
    with tempfile.TemporaryDirectory() as tmpdir:
        yield tmpdir


def _write(tmpdir, name, text):
    path = os.path.join(tmpdir, name)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    return path


def _family_file(tmpdir, name, n):
    path = os.path.join(tmpdir, f"{name}{n}.txt")
    graph_file.write_graph_file(path, generators.gen_family(name, n))
    return path


def test_solve_p6(tmpdir_path, capsys):
    path = _family_file(tmpdir_path, "path", 6)
    assert eds_tool.cli_main(["solve", path]) == 0
    assert capsys.readouterr().out == "EDS 2\n1 4\n"


def test_solve_c4_has_none(tmpdir_path, capsys):
    path = _family_file(tmpdir_path, "cycle", 4)
    assert eds_tool.cli_main(["solve", path]) == 1
    assert capsys.readouterr().out == "NONE\n"


def test_solve_output_is_repeatable(tmpdir_path, capsys):
    g, _ = generators.gen_s115_free(6, 6, 0.3, seed=31)
    path = os.path.join(tmpdir_path, "g.txt")
    graph_file.write_graph_file(path, g)
    first_code = eds_tool.cli_main(["solve", path])
    first = capsys.readouterr().out
    assert eds_tool.cli_main(["solve", path]) == first_code
    assert capsys.readouterr().out == first


def test_solve_writes_trace(tmpdir_path, capsys):
    path = _family_file(tmpdir_path, "path", 8)
    trace_path = os.path.join(tmpdir_path, "trace.json")
    assert eds_tool.cli_main(["solve", path, "--trace", trace_path]) == 0
    solution = capsys.readouterr().out.splitlines()[1]
    with open(trace_path, "r", encoding="utf-8") as f:
        trace = solver_driver.SolveTrace.from_dict(json.load(f))
    (component,) = trace.components
    assert " ".join(map(str, component.solution)) == solution


def test_strict_solve_refuses_the_spider(tmpdir_path, capsys):
    path = _family_file(tmpdir_path, "spider115", 8)
    assert eds_tool.cli_main(["solve", path, "--strict"]) == 4
    captured = capsys.readouterr()
    assert "0 1 2 3 4 5 6 7" in captured.err
    assert captured.out == ""

    assert eds_tool.cli_main(["solve", path, "--permissive"]) == 1
    assert capsys.readouterr().out == "NONE\n"


def test_strict_and_permissive_conflict(tmpdir_path):
    path = _family_file(tmpdir_path, "path", 4)
    assert eds_tool.cli_main(["solve", path, "--strict", "--permissive"]) == 2


def test_strict_config_file(tmpdir_path, capsys):
    path = _family_file(tmpdir_path, "spider115", 8)
    args = ["solve", path, "--config-file", "strict_config.yaml"]
    assert eds_tool.cli_main(args) == 4
    assert eds_tool.cli_main(args + ["--permissive"]) == 1
    assert capsys.readouterr().out == "NONE\n"


def test_solver_defaults_come_from_default_config(tmpdir_path, monkeypatch):
    configs = os.path.join(tmpdir_path, "configs")
    os.mkdir(configs)
    _write(configs, "default_config.yaml", "strict: true\n")
    monkeypatch.setattr(solver_config, "CONFIG_DIR", configs)
    path = _family_file(tmpdir_path, "spider115", 8)
    assert eds_tool.cli_main(["solve", path]) == 4
    assert eds_tool.cli_main(["solve", path, "--permissive"]) == 1


def test_unknown_setting_in_config_file(tmpdir_path):
    config = _write(tmpdir_path, "bad.yaml", "no_such_setting: 1\n")
    path = _family_file(tmpdir_path, "path", 4)
    assert eds_tool.cli_main(["solve", path, "--config-file", config]) == 2


def test_oracle_p7(tmpdir_path, capsys):
    path = _family_file(tmpdir_path, "path", 7)
    assert eds_tool.cli_main(["oracle", path]) == 0
    assert capsys.readouterr().out == "EDS 3\n0 3 6\n"
    assert eds_tool.cli_main(["oracle", path, "--heuristic", "mrv"]) == 0
    assert capsys.readouterr().out == "EDS 3\n0 3 6\n"


@pytest.mark.parametrize(
    "vertex_set, code, output",
    [
        ("0 3", 0, "VALID\n"),
        ("0 2", 1, "INVALID v=1 count=2\n"),
        ("", 1, "INVALID v=0 count=0\n"),
    ],
)
def test_verify_p4(tmpdir_path, capsys, vertex_set, code, output):
    path = _family_file(tmpdir_path, "path", 4)
    assert eds_tool.cli_main(["verify", path, "--set", vertex_set]) == code
    assert capsys.readouterr().out == output


@pytest.mark.parametrize("vertex_set", ["0 9", "0 0 3"])
def test_verify_rejects_bad_sets(tmpdir_path, capsys, vertex_set):
    path = _family_file(tmpdir_path, "path", 4)
    assert eds_tool.cli_main(["verify", path, "--set", vertex_set]) == 2
    captured = capsys.readouterr()
    assert captured.out == ""
    assert captured.err.startswith("error:")


@pytest.mark.parametrize(
    "family, n, pattern, code",
    [
        ("spider115", 8, "s115", 1),
        ("path", 8, "s115", 0),
        ("path", 8, "p8", 1),
        ("path", 7, "p8", 0),
        ("cycle", 6, "c6", 1),
        ("cycle", 8, "c6", 0),
    ],
)
def test_detect(tmpdir_path, capsys, family, n, pattern, code):
    path = _family_file(tmpdir_path, family, n)
    assert eds_tool.cli_main(["detect", path, "--pattern", pattern]) == code
    out = capsys.readouterr().out
    if code == 0:
        assert out == "FREE\n"
    else:
        assert len(out.split()) == {"s115": 8, "p8": 8, "c6": 6}[pattern]


def test_detect_prints_the_spider(tmpdir_path, capsys):
    path = _family_file(tmpdir_path, "spider115", 8)
    eds_tool.cli_main(["detect", path])
    assert capsys.readouterr().out == "0 1 2 3 4 5 6 7\n"


def test_bad_inputs(tmpdir_path):
    malformed = _write(tmpdir_path, "bad.txt", "3 2\n0 1\n")
    triangle = _write(tmpdir_path, "tri.txt", "3 3\n0 1\n1 2\n2 0\n")
    missing = os.path.join(tmpdir_path, "missing.txt")
    assert eds_tool.cli_main(["solve", malformed]) == 2
    assert eds_tool.cli_main(["solve", missing]) == 2
    assert eds_tool.cli_main(["solve", triangle]) == 3
    assert eds_tool.cli_main(["detect", triangle]) == 3
    assert eds_tool.cli_main(["frobnicate"]) == 2


def test_gen_planted_writes_solution(tmpdir_path):
    out = os.path.join(tmpdir_path, "planted.txt")
    args = ["gen", "--out", out, "--kind", "planted", "--nd", "4", "--seed", "3"]
    assert eds_tool.cli_main(args) == 0
    g = graph_file.read_graph_file(out)
    planted = graph_file.read_solution_file(out + ".solution")
    assert len(planted) == 4
    assert eds_tool.cli_main(["verify", out, "--set", planted.to_line()]) == 0
    assert eds_core.verify(g, planted).valid


def test_gen_is_deterministic(tmpdir_path):
    paths = [os.path.join(tmpdir_path, f"g{i}.txt") for i in range(2)]
    for path in paths:
        args = ["gen", "--out", path, "--kind", "s115free", "--nx", "6", "--seed", "8"]
        assert eds_tool.cli_main(args) == 0
    contents = []
    for path in paths:
        with open(path, "r", encoding="utf-8") as f:
            contents.append(f.read())
    assert contents[0] == contents[1]
    assert contents[0].startswith("# generated kind=s115free")
    assert not os.path.exists(paths[0] + ".solution")


def test_gen_family(tmpdir_path):
    out = os.path.join(tmpdir_path, "c6.txt")
    args = ["gen", "--out", out, "--kind", "family", "--family", "cycle"]
    assert eds_tool.cli_main(args) == 0
    g = graph_file.read_graph_file(out)
    assert g.edges() == generators.gen_family("cycle", 6).edges()


def test_gen_bad_parameter(tmpdir_path):
    out = os.path.join(tmpdir_path, "g.txt")
    assert eds_tool.cli_main(["gen", "--out", out, "--nd", "0"]) == 2
    assert not os.path.exists(out)


def test_compare(tmpdir_path, capsys):
    reports = os.path.join(tmpdir_path, "reports.jsonl")
    args = [
        "compare",
        "--count", "6",
        "--seed", "1",
        "--max-n", "10",
        "--reports", reports,
        "--no-progress",
    ]  # fmt: skip
    assert eds_tool.cli_main(args) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "instances 6"
    assert lines[1] == "agree 6/6"
    with open(reports, "r", encoding="utf-8") as f:
        records = [json.loads(line) for line in f]
    assert len(records) == 6
    assert all(r["agree"] for r in records)


def test_bench(capsys):
    args = ["bench", "--sizes", "6", "9", "--repeats", "2", "--no-progress"]
    assert eds_tool.cli_main(args) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "size\tseed\tn\tm\tfound\tseconds"
    assert [line.split("\t")[0] for line in lines[1:]] == ["6", "6", "9", "9"]
