import json
import subprocess
import sys
from io import StringIO
from pathlib import Path

import pytest

from wirecalc.cli import main
from wirecalc.parser import parse_term
from wirecalc.stdlib import E
from wirecalc.syntax import alpha_equal

PROGRAMS = Path(__file__).parent.parent / "programs"
FLIP = str(PROGRAMS / "flipflop.wire")
DIRECTED = str(PROGRAMS / "directed.wire")


def run(*argv):
    out = StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_check_lists_sorts():
    code, out = run("check", FLIP)
    assert code == 0
    assert "A : (0,0)" in out.splitlines()
    assert "F0 : (1,1)" in out.splitlines()


def test_check_reports_sort_errors(capsys):
    code, _ = run("check", str(PROGRAMS / "bad.wire"))
    assert code == 1
    assert "sort error at 2:" in capsys.readouterr().err


def test_check_empty_program():
    assert run("check", str(PROGRAMS / "empty.wire")) == (0, "")


def test_missing_file(capsys):
    code, _ = run("check", "/nonexistent.wire")
    assert code == 1
    assert "cannot read" in capsys.readouterr().err


def test_syntax_error(tmp_path, capsys):
    f = tmp_path / "x.wire"
    f.write_text("signals 0 1; def P : (1,1) = I I;")
    assert run("check", str(f))[0] == 1
    assert "syntax error at 1:32" in capsys.readouterr().err


def test_lts_formats():
    code, out = run("lts", FLIP, "--term", "A", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["states"]) == 3 and doc["complete"]
    code, out = run("lts", FLIP, "--term", "A", "--format", "dot")
    assert code == 0 and out.startswith("digraph lts {")
    code, out = run("lts", FLIP, "--term", "F0")
    assert out.startswith("sort (1,1)\nstates 2\ncomplete true\n")
    assert "0 --0/0--> 0" in out
    code, out = run("lts", FLIP, "--term", "ZERO")
    assert "states 1\n" in out


def test_lts_budget_writes_partial_graph(capsys):
    code, out = run("lts", FLIP, "--term", "A", "--budget", "2", "--format", "json")
    assert code == 2
    assert json.loads(out)["complete"] is False
    assert "partial graph" in capsys.readouterr().err


def test_unknown_definition(capsys):
    assert run("lts", FLIP, "--term", "Nope")[0] == 1
    assert "Nope" in capsys.readouterr().err


def test_bisim_positive_and_negative():
    code, out = run("bisim", FLIP, "A", "ZERO00")
    assert code == 0 and out.startswith("bisimilar")
    code, out = run("bisim", FLIP, "F0", "F1", "--format", "json")
    assert code == 10
    assert json.loads(out)["counterexample"][0]["label"] == "0/0"
    assert run("bisim", FLIP, "Ident", "Snake")[0] == 0
    assert run("bisim", FLIP, "I", "I")[0] == 0


def test_bisim_sort_mismatch(capsys):
    assert run("bisim", FLIP, "F0", "A")[0] == 3
    assert "sorts (1,1) and (0,0)" in capsys.readouterr().err


def test_bisim_budget(capsys):
    assert run("bisim", FLIP, "A", "ZERO00", "--budget", "2")[0] == 2
    assert "no answer" in capsys.readouterr().err


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv("WIREC_BUDGET", "2")
    assert run("bisim", FLIP, "A", "ZERO00")[0] == 2
    # the flag wins over the variable
    assert run("bisim", FLIP, "A", "ZERO00", "--budget", "50")[0] == 0
    monkeypatch.setenv("WIREC_BUDGET", "many")
    assert run("bisim", FLIP, "A", "ZERO00")[0] == 1


@pytest.mark.parametrize("argv", [
    ["bisim", FLIP, "A"],
    ["lts", FLIP, "--term", "A", "--budget", "0"],
    ["lts", FLIP, "--term", "A", "--format", "svg"],
    ["frobnicate"],
])
def test_usage_errors_exit_one(argv):
    with pytest.raises(SystemExit) as info:
        main(argv, out=StringIO())
    assert info.value.code == 1


def test_directed_program():
    code, out = run("check", DIRECTED)
    assert "DL : (e,LR)" in out
    assert run("bisim", DIRECTED, "SnakeL", "IL")[0] == 0


def test_mode_override(tmp_path, capsys):
    f = tmp_path / "m.wire"
    f.write_text("signals 0 1; def IL : (L,L) = I_L;")
    assert run("check", str(f))[0] == 1
    capsys.readouterr()
    assert run("check", str(f), "--mode", "directed") == (0, "IL : (L,L)\n")


def test_star_command():
    code, out = run("star", FLIP, "F0")
    assert code == 0
    assert out.strip().endswith(": (1,1)")
    # library constants resolve too: d rotates to e
    code, out = run("star", FLIP, "d")
    term, sort = out.rsplit(" : ", 1)
    assert alpha_equal(parse_term(term), E) and sort == "(2,0)\n"
    code, out = run("star", DIRECTED, "DL")
    assert out.strip().endswith(": (LR,e)")


def test_laws_command():
    code, out = run("laws", "--n-max", "1", "--seed", "2")
    assert code == 0
    assert out.startswith("# seed=2")
    assert ", 0 failed, 0 inconclusive" in out.splitlines()[-1]


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "wirecalc", "bisim", FLIP, "F0", "F1"],
                          capture_output=True, text=True)
    assert proc.returncode == 10
    assert "left plays 0/0" in proc.stdout
