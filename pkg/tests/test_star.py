from fractions import Fraction

import pytest
from hypothesis import given

from conftest import rng_of, seeds
from tame_elim.cells import UnboundedError, mu_function
from tame_elim.formula import LinTerm, conj, disj, evaluate, lt, substitute
from tame_elim.qe import equivalent
from tame_elim.selftest import random_components, random_star_set
from tame_elim.star import (
    convert_atom, eval_star, mu_star, slot_convert, standard_points_1d, standard_trace,
)
from tame_elim.starnum import EPS, OMEGA, normalize, std
from tame_elim.syntax import parse, to_sexp


def test_eval_star_examples():
    assert eval_star(parse("(exists (u) (and (< t u) (< u (+ t eps))))"), {"t": OMEGA})
    assert eval_star(parse("(< (* 2 t) 1)"), {"t": normalize(Fraction(1, 2) - EPS)})
    assert not eval_star(parse("(< t 1000000)"), {"t": OMEGA})


def test_mu_star_examples():
    assert mu_star(parse("(and (< 0 t) (< t (+ 1 eps)))"), "t") == normalize(1 + EPS)
    assert std(mu_star(parse("(and (< (- 0 eps) t) (< t (+ 1 eps)))"), "t")) == 1
    m = mu_star(parse("(and (< 1 t) (< t (+ 1 eps)))"), "t")
    assert m == EPS and std(m) == 0
    with pytest.raises(UnboundedError):
        mu_star(parse("(< 0 t)"), "t")


def test_standard_part_examples():
    f = parse("(and (< 0 t) (< t (+ 1 eps)))")
    assert to_sexp(standard_points_1d(f, "t")) == "(and (< 0 t) (<= t 1))"
    g = parse("(or (and (< (- 0 eps) t) (< t eps)) (and (< (+ 2 eps) t) (<= t (- 3 eps))) (= t 5))")
    assert to_sexp(standard_points_1d(g, "t")) == "(or (= t 0) (= t 5) (and (< 2 t) (< t 3)))"
    assert equivalent(standard_trace(g), standard_points_1d(g, "t"))
    assert mu_star(g, "t") == 1


@pytest.mark.parametrize("op,c,out", [
    ("<", "(+ 1 eps)", "(<= t 1)"),
    ("<", "(- 1 eps)", "(< t 1)"),
    ("<=", "(+ 1 eps)", "(<= t 1)"),
    ("<=", "(- 1 eps)", "(< t 1)"),
    ("=", "(+ 1 eps)", "false"),
    ("<", "omega", "true"),
    ("<", "(- 0 omega)", "false"),
    ("=", "omega", "false"),
])
def test_convert_atom_table(op, c, out):
    assert to_sexp(convert_atom(parse(f"({op} t {c})"))) == out


def test_slot_convert_example():
    sc = slot_convert(parse("(and (< u (+ a 1)) (<= (* 2 a) v))"), ["a"], {"a": normalize(Fraction(1, 3) + EPS)})
    assert to_sexp(sc.formula) == "(and (<= (+ u z_1) 0) (< (* 2 z_2) v))"
    assert sc.omega == (Fraction(-4, 3), Fraction(1, 3)) and sc.tags == (-1, 1)


@given(seeds)
def test_standard_part_two_ways(seed):
    rng = rng_of(seed)
    f = random_star_set(rng, LinTerm.var("t"))
    s = standard_points_1d(f, "t")
    assert equivalent(s, standard_trace(f))
    for k in range(-64, 65):
        q = Fraction(k, 8)
        assert evaluate(s, {"t": q}) == eval_star(f, {"t": q})


@given(seeds)
def test_mu_star_translation_invariant(seed):
    rng = rng_of(seed)
    f = random_star_set(rng, LinTerm.var("t"))
    try:
        m = mu_star(f, "t")
    except UnboundedError:
        return
    shifted = substitute(f, {"t": LinTerm.var("t") + LinTerm.constant(normalize(3 - EPS))})
    assert normalize(mu_star(shifted, "t")) == normalize(m)


@given(seeds)
def test_mu_star_matches_mu_function_on_standard_sets(seed):
    t = LinTerm.var("t")
    f = disj([conj(lt(lo, t), lt(t, hi)) for lo, hi in random_components(rng_of(seed))])
    assert mu_star(f, "t") == (mu_function(f, "t").at({}) or 0)
