import json
import os
import subprocess
import sys
import time
from pathlib import Path

import pytest

from tame_elim.cli import main

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def run(capsys, *args):
    code = main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("args,code,first_line", [
    (["qe", "density.sexp"], 0, "(< a b)"),
    (["decide", "eps-positive.sexp"], 0, "true"),
    (["dim", "diagonal.sexp"], 0, "1"),
    (["celldec", "diagonal.sexp"], 0, "cell 0 dim 1: (and (< 0 x) (< x 1) (= x y))"),
    (["ordcheck", "lex-square.sexp"], 0, "linear order of dimension 2"),
    (["ordcheck", "not-an-order.sexp"], 1, "axiom antisymmetric fails; witness (1/2 1/4) (1/2 1/2)"),
    (["reduce-order", "lex-square.sexp"], 0, "step 1: dim 2 -> 1"),
    (["cutdef", "not-a-cut.sexp"], 1, "not a cut: (1/2) is in V but (-1) below it is not"),
    (["eliminate", "type-below.sexp"], 0, "phi: (<= y z_1)"),
    (["eliminate", "type-sentence.sexp"], 0, "phi: true"),
])
def test_commands(capsys, args, code, first_line):
    args = [args[0], SAMPLES / args[1]]
    got, out, _ = run(capsys, *args)
    assert got == code
    assert out.splitlines()[0] == first_line


def test_eliminate_with_checks(capsys):
    code, out, _ = run(capsys, "eliminate", SAMPLES / "type-between.sexp", "--oracle", "--verify")
    assert code == 0
    lines = out.splitlines()
    assert "omega: (0 1)" in lines and "phi(omega): (and (< 0 y) (< y 1))" in lines
    assert lines[-1] == "verify: pass"


def test_reduce_iterate(capsys):
    code, out, _ = run(capsys, "reduce-order", "--iterate", SAMPLES / "lex-cube.sexp")
    assert code == 0
    assert "step 2: dim 2 -> 1" in out and "fail" not in out


def test_cut_square(capsys):
    code, out, _ = run(capsys, "cutdef", SAMPLES / "cut-square.sexp")
    assert code == 0
    assert "(or (and (< 0 u2) (<= u2 1/2) (= u1 1/2)) (and (< 0 u1) (< 0 u2) (< u1 1/2) (< u2 1)))" in out


@pytest.mark.parametrize("args", [
    ["qe", "missing.sexp"],
    ["selftest", "--count", "0"],
    ["bogus"],
    ["decide", SAMPLES / "density.sexp"],  # free variables
])
def test_input_errors(capsys, args):
    code, _, err = run(capsys, *args)
    assert code == 2 and err


def test_parse_error(capsys, tmp_path):
    p = tmp_path / "bad.sexp"
    p.write_text("(< a")
    assert run(capsys, "qe", p)[0] == 2


def test_json_is_deterministic(capsys):
    a = run(capsys, "--json", "eliminate", SAMPLES / "type-between.sexp")[1]
    b = run(capsys, "eliminate", SAMPLES / "type-between.sexp", "--json")[1]
    assert a == b
    rep = json.loads(a)
    assert rep["command"] == "eliminate" and rep["status"] == 0
    assert rep["input_digest"].startswith("sha256:") and "timings" not in rep


def test_trace_from_environment():
    env = dict(os.environ, TAME_ELIM_TRACE="1")
    p = subprocess.run([sys.executable, "-m", "tame_elim.cli", "qe", str(SAMPLES / "density.sexp")],
                       capture_output=True, text=True, env=env)
    assert p.returncode == 0 and p.stdout.strip() == "(< a b)"
    assert "time qe:" in p.stderr


def test_small_selftest(capsys):
    t = time.monotonic()
    code, out, _ = run(capsys, "selftest", "--count", "1")
    assert time.monotonic() - t < 10
    assert code == 0 and out.splitlines()[-1] == "overall: PASS"
