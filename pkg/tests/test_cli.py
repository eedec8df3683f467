from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from ncdc3d import cli
from ncdc3d.fixtures import FIXTURES, fixture, fixture_text

SCHEMA = {"verdict", "grid", "objects", "dropped_defaults", "violated", "inferred", "cost", "budget_exhausted"}


def run(*argv: str, stdin: str = "") -> tuple[int, str, str]:
    args = cli.build_parser().parse_args(list(argv))
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(cli.config_from_args(args), io.StringIO(stdin), out, err)
    return code, out.getvalue(), err.getvalue()


def structured(*argv: str, stdin: str = "") -> tuple[int, dict]:
    code, out, _ = run(*argv, "--structured", stdin=stdin)
    return code, json.loads(out)


def test_check_marine_prints_witness():
    code, out, _ = run("check", "marine")
    assert code == cli.EXIT_OK
    assert out.startswith("verdict: consistent")
    assert "Fungi:" in out


def test_check_building_is_inconsistent():
    code, out, _ = run("check", "building_B1")
    assert code == cli.EXIT_INCONSISTENT
    assert "inconsistent" in out


def test_explain_building_structured():
    code, doc = structured("explain", "building_B1_mandatory")
    assert code == cli.EXIT_OK
    assert doc["violated"] == [["Director", "Entrance"]]
    assert doc["cost"] == [1, 0]


def test_infer_marine_enumerated():
    code, doc = structured("infer", "marine", "--enumerate")
    assert code == cli.EXIT_OK
    assert "SEB" in doc["inferred"]["Fungi/SedRock"]


@pytest.mark.parametrize("name", FIXTURES)
@pytest.mark.parametrize("command", ["check", "explain", "infer"])
def test_structured_schema_for_every_fixture(name, command):
    if command == "infer" and not fixture(name).infer_requests:
        assert run(command, name, "--structured")[0] == cli.EXIT_USAGE
        return
    code, out, _ = run(command, name, "--structured")
    doc = json.loads(out)
    assert set(doc) == SCHEMA
    assert isinstance(doc["verdict"], str) and isinstance(doc["budget_exhausted"], bool)
    assert len(doc["grid"]) == 3
    for cells in doc["objects"].values():
        assert cells == sorted(cells) and all(len(c) == 3 for c in cells)
    assert all(len(p) == 2 for p in doc["violated"] + doc["dropped_defaults"])
    assert code in (cli.EXIT_OK, cli.EXIT_INCONSISTENT)
    # byte-stable output
    assert run(command, name, "--structured")[1] == out


def test_stdin_and_file_input(tmp_path):
    text = fixture_text("marine")
    assert run("check", "-", stdin=text)[0] == cli.EXIT_OK
    path = tmp_path / "m.ncdc"
    path.write_text(text)
    assert run("check", str(path))[1] == run("check", "marine")[1]


@pytest.mark.parametrize("argv,stdin", [
    (("check", "no_such_file.ncdc"), ""),
    (("check", "-"), "objects a b\nrel a b XYZ\n"),
    (("check", "-"), "objects a\nrel a a NM\n"),
    (("oracle", "marine"), ""),
])
def test_usage_errors(argv, stdin):
    code, out, err = run(*argv, stdin=stdin)
    assert code == cli.EXIT_USAGE
    assert err and not out


def test_parse_error_reports_position():
    _, _, err = run("check", "-", stdin="objects a b\nrel a b XYZ\n")
    assert "2:9" in err or "line 2" in err


def test_budget_exhaustion_exits_3():
    code, doc = structured("check", "building_B1", "--max-nodes", "3")
    assert code == cli.EXIT_UNKNOWN
    assert doc["budget_exhausted"] is True
    assert run("explain", "building_B1_mandatory", "--max-nodes", "3")[0] == cli.EXIT_UNKNOWN


def test_small_grid_is_not_a_proof():
    code, out, _ = run("check", "appendix_b", "--grid", "2")
    assert code == cli.EXIT_UNKNOWN
    assert "not found at this grid" in out


def test_connected_override():
    assert run("check", "marine", "--connected")[0] == cli.EXIT_INCONSISTENT
    assert run("check", "marine", "--disconnected")[0] == cli.EXIT_OK


def test_emit_facts_and_program():
    code, out, _ = run("emit", "marine", "--facts-only")
    assert code == cli.EXIT_OK and "relation(2,1,swb)." in out and ":-" not in out
    code, out, _ = run("emit", "building_B1_mandatory", "--mode", "explain")
    assert code == cli.EXIT_OK and "[1@2,U,V]" in out


def test_oracle_subcommand():
    text = "objects a b\nrel a b NM\n"
    code, doc = structured("oracle", "-", "--grid", "2", stdin=text)
    assert code == cli.EXIT_OK and doc["verdict"] == "consistent"
    cycle = "objects a b c\nrel a b NM\nrel b c NM\nrel c a NM\n"
    code, doc = structured("oracle", "-", "--grid", "2x3x1", "--mode", "explain", stdin=cycle)
    assert code == cli.EXIT_OK and doc["cost"] == 1
    assert len(doc["optimal_sets"]) == 3


def test_bench_table():
    code, out, _ = run("bench", "--copies", "3")
    assert code == cli.EXIT_OK
    lines = out.splitlines()
    assert lines[0].split()[:3] == ["Instance", "|V|", "|C|"]
    names = [line.split()[0] for line in lines[1:]]
    assert names == ["M1", "M2", "M3", "B1", "B1'"]


def test_bench_rows_trends():
    rows = {r.instance: r for r in cli.bench_rows(cli.RunConfig("bench", copies=3))}
    nodes = [rows[f"M{k}"].nodes for k in (1, 2, 3)]
    assert nodes == sorted(nodes) and nodes[0] < nodes[-1]
    assert rows["B1"].nodes > rows["B1'"].nodes
    assert rows["B1"].verdict == "inconsistent" and rows["B1'"].verdict == "consistent"
    assert [rows[f"M{k}"].constraints for k in (1, 2, 3)] == [7, 14, 21]


def test_run_config_validation():
    with pytest.raises(ValueError):
        cli.RunConfig("check", max_nodes=0)
    with pytest.raises(ValueError):
        cli.RunConfig("check", workers=0)
    assert cli.RunConfig("check").output is cli.OutputFormat.HUMAN


@pytest.mark.parametrize("text,dims", [("9", (9, 9, 9)), ("2x3x4", (2, 3, 4))])
def test_parse_grid(text, dims):
    assert cli.parse_grid(text).dims == dims


def test_bad_flags_exit_2(capsys):
    with pytest.raises(SystemExit) as err:
        cli.main(["check", "marine", "--grid", "0"])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        cli.main(["check", "marine", "--max-nodes", "-1"])
    assert err.value.code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ncdc3d", "check", "building_B1"], capture_output=True, text=True)
    assert proc.returncode == 1
    assert "inconsistent" in proc.stdout
