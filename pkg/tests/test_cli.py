import json
import pathlib

import pytest

from unfolder.cli import main

from conftest import FIXTURES

GOLDENS = pathlib.Path(__file__).resolve().parent / "goldens"


def fixture(name):
    return str(FIXTURES / f"{name}.ufl")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_unfold_add_matches_golden(capsys):
    code, out = run(capsys, "unfold", "--steps", "2", fixture("add"))
    assert code == 0
    assert out == (GOLDENS / "add_unfold.txt").read_text()


def test_unfold_seniors_defer_matches_golden(capsys):
    code, out = run(capsys, "unfold", "--steps", "2", "--defer-comparisons",
                    fixture("seniors"))
    assert code == 0
    assert out == (GOLDENS / "seniors_unfold.txt").read_text()


def test_coverage_matches_golden(capsys):
    code, out = run(capsys, "coverage", fixture("rev"))
    assert code == 0
    assert out == (GOLDENS / "rev_coverage.txt").read_text()


def test_abstract_matches_golden(capsys):
    code, out = run(capsys, "abstract", fixture("parity"))
    assert code == 0
    assert out == (GOLDENS / "parity_abstract.txt").read_text()


def test_run_with_verify(capsys):
    code, out = run(capsys, "run", "--verify", "main", fixture("ones"))
    assert code == 0
    assert out.splitlines() == ["1", "verify: OK"]


def test_run_json_schema(capsys):
    code, out = run(capsys, "run", "--json", "--verify", "goal",
                    fixture("chain"))
    assert code == 0
    body = json.loads(out)
    assert body["schema"] == 1
    assert body["value"] == "10"
    assert body["verified"] is True
    assert body["fuel"] > 0


def test_check_ok_and_violations(capsys, tmp_path):
    code, out = run(capsys, "check", fixture("seniors"))
    assert code == 0
    bad = tmp_path / "bad.ufl"
    bad.write_text("g Zero = Zero\ng x = Zero\n")
    code, out = run(capsys, "check", str(bad))
    assert code == 1
    assert "overlap" in out


def test_check_missing_file_fails(capsys):
    with pytest.raises(SystemExit) as err:
        main(["check", "no-such-file.ufl"])
    assert err.value.code == 1


def test_usage_error_exits_two():
    with pytest.raises(SystemExit) as err:
        main(["unfold"])  # missing file argument
    assert err.value.code == 2


def test_trace_subcommand(capsys):
    code, out = run(capsys, "trace", "goal2", fixture("chain"))
    assert code == 0
    assert "<Goal2,F2,F,G,H,F,G,H>" in out


def test_debug_subcommand_scripted(capsys, monkeypatch):
    import io

    monkeypatch.setattr("sys.stdin", io.StringIO("n\nn\ny\n"))
    code, out = run(capsys, "debug", "main24", fixture("addb"))
    assert code == 0
    assert "Blamed: A3" in out


def test_unfold_json_schema(capsys):
    code, out = run(capsys, "unfold", "--steps", "1", "--json",
                    fixture("ones"))
    body = json.loads(out)
    assert body["schema"] == 1
    steps = body["interpretations"]
    assert steps[1]["step"] == 1
    heads = {f["head"] for f in steps[1]["facts"]}
    assert heads == {"ones", "first(Cons(b,c))"}
    assert steps[1]["bot_facts"][0]["head"] == "main"


def test_fuel_env_override(capsys, monkeypatch):
    monkeypatch.setenv("UNFOLDER_FUEL", "1")
    code, out = run(capsys, "run", "main", fixture("ones"))
    assert code == 1  # one reduction step is never enough


def test_bounds_must_be_positive():
    with pytest.raises(SystemExit) as err:
        main(["unfold", "--steps", "0", fixture("add")])
    assert err.value.code == 2
