import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import seeds
from tame_elim.corpus import lex_square, line
from tame_elim.cutdef import (
    CutSpec, NotACutError, convex_hull_shortcut, cut_definable, cut_definable_uniform, is_cut,
    random_cutspec, trace_on, uniform_base, verify_cut,
)
from tame_elim.qe import equivalent
from tame_elim.selftest import counterexample_spec, cut_probes
from tame_elim.starnum import EPS, normalize
from tame_elim.syntax import parse, to_sexp

HALF = Fraction(1, 2)
P = lex_square()


def _below(a, strict=True):
    return CutSpec(P, P.lt(P.coords, a) if strict else P.le(P.coords, a))


@pytest.mark.parametrize("a,strict,branch,W", [
    ((HALF, HALF), True, "max-outside-B",
     "(or (and (< 0 u2) (< u2 1/2) (= u1 1/2)) (and (< 0 u1) (< 0 u2) (< u1 1/2) (< u2 1)))"),
    ((HALF, normalize(HALF + EPS)), True, "max-in-B",
     "(or (and (< 0 u2) (<= u2 1/2) (= u1 1/2)) (and (< 0 u1) (< 0 u2) (< u1 1/2) (< u2 1)))"),
    ((normalize(HALF + EPS), HALF), False, "max-in-B", "(and (< 0 u1) (< 0 u2) (< u2 1) (<= u1 1/2))"),
    ((HALF, EPS), False, "no-max", "(and (< 0 u1) (< 0 u2) (< u1 1/2) (< u2 1))"),
    ((normalize(HALF - EPS), HALF), True, "no-max", "(and (< 0 u1) (< 0 u2) (< u1 1/2) (< u2 1))"),
])
def test_lex_square_cuts(a, strict, branch, W):
    spec = _below(a, strict)
    assert is_cut(spec)
    r = cut_definable(spec)
    assert r.lam["branch"] == branch and to_sexp(r.W) == W
    assert r.depth == 2
    assert verify_cut(spec, r, cut_probes(P, spec, random.Random(0), 50))


def test_counterexample_rejected():
    spec = counterexample_spec()
    chk = is_cut(spec)
    assert not chk.ok
    lower, upper = chk.witness
    assert lower[0] < upper[0] and 0 < upper[0] < 1
    with pytest.raises(NotACutError):
        cut_definable(spec)
    assert equivalent(trace_on(spec), parse("(and (< 0 u1) (< u1 1))"))
    assert equivalent(convex_hull_shortcut(spec), parse("(< 0 u1)"))


def test_hull_shortcut_fine_for_star_cuts():
    spec = _below((HALF, normalize(HALF + EPS)))
    assert equivalent(convex_hull_shortcut(spec), trace_on(spec))


def test_uniform_base_groups_by_shape():
    L = line(0, 1)
    got = uniform_base(L, parse("(< u1 x)"), ["x"], [
        {"x": Fraction(1, 3)}, {"x": normalize(HALF + EPS)}, {"x": normalize(Fraction(2, 3) - EPS)},
    ])
    got = [(to_sexp(g.E), [(om, tags) for _, om, tags in g.instances]) for g in got]
    assert got == [
        ("(and (< (+ u1 z_1) 0) (< 0 u1) (< u1 1))", [((Fraction(-1, 3),), (0,))]),
        ("(and (< 0 u1) (< u1 1) (<= (+ u1 z_1) 0))", [((-HALF,), (-1,))]),
        ("(and (< (+ u1 z_1) 0) (< 0 u1) (< u1 1))", [((Fraction(-2, 3),), (1,))]),
    ]


def test_uniform_family_on_lex_square():
    V = parse("(or (< u1 x) (and (= u1 x) (< u2 1/2)))")
    out = cut_definable_uniform(P, V, ["x"], [{"x": Fraction(1, 4)}, {"x": normalize(HALF + EPS)}])
    (_, r1), (_, r2) = out
    assert r1.lam["branch"] == "max-outside-B"
    assert to_sexp(r2.W) == "(and (< 0 u1) (< 0 u2) (< u2 1) (<= u1 1/2))"


@settings(max_examples=25)
@given(seeds)
def test_random_lex_square_cuts(seed):
    rng = random.Random(seed)
    spec = random_cutspec(rng, P)
    assert is_cut(spec)
    r = cut_definable(spec, check=False)
    assert verify_cut(spec, r, cut_probes(P, spec, rng, 40))
