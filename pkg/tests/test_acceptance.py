"""Acceptance criteria 1-8, one pass/fail line each.

The full selftest runs once in this process and once through the console
script; the second run supplies the byte-identity check.
"""
import subprocess
import sys
import time

import pytest

from tame_elim.selftest import BUDGET_SECONDS, SUITE_NAMES, determinism_result, run_selftest

SUITE_BUDGETS = {1: 60, 2: 300}


@pytest.fixture(scope="module")
def runs():
    t0 = time.perf_counter()
    first = run_selftest(seed=0)
    elapsed = time.perf_counter() - t0
    p = subprocess.run([sys.executable, "-m", "tame_elim.cli", "selftest", "--seed", "0"],
                       capture_output=True, text=True)
    return first, elapsed, p


def _report(capsys, k, ok, detail=""):
    with capsys.disabled():
        print(f"\ncriterion {k} ({SUITE_NAMES[k]}): {'PASS' if ok else 'FAIL'} {detail}".rstrip())


@pytest.mark.parametrize("k", range(1, 8))
def test_criterion(runs, capsys, k):
    first, _, _ = runs
    suite = next(s for s in first.suites if s.key == k)
    secs = first.timings[SUITE_NAMES[k]]
    within = secs < SUITE_BUDGETS.get(k, BUDGET_SECONDS)
    ok = suite.passed and within
    _report(capsys, k, ok, f"{suite.total - len(suite.failures)}/{suite.total} in {secs:.1f}s")
    assert suite.passed, "\n".join(suite.lines())
    assert within, f"{secs:.1f}s over budget"


def test_criterion_8(runs, capsys):
    first, elapsed, p = runs
    res = determinism_result(first, p.stdout, elapsed)
    ok = res.passed and p.returncode == 0
    _report(capsys, 8, ok, f"first run {elapsed:.0f}s")
    assert p.returncode == 0, p.stderr
    assert res.passed, "\n".join(res.lines())
