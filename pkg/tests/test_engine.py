from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import rng_of, seeds
from tame_elim.engine import (
    ArityError, define_type, oracle_define_type, random_instance, verify_equivalence,
)
from tame_elim.formula import LE, LT, LinTerm, make_atom, map_atoms, substitute
from tame_elim.qe import equivalent, simplify
from tame_elim.star import eval_star
from tame_elim.starnum import EPS, OMEGA, is_standard, normalize
from tame_elim.syntax import parse, to_sexp


def _define(text, xs, ys, a):
    return define_type(parse(text), xs, ys, a)


@pytest.mark.parametrize("text,xs,ys,a,expected", [
    ("(< y x)", ["x"], ["y"], (normalize(1 + EPS),), "(<= y 1)"),
    ("(and (< x1 y) (< y x2))", ["x1", "x2"], ["y"], (EPS, normalize(1 - EPS)), "(and (< 0 y) (< y 1))"),
    ("(< (+ x1 x2) 1)", ["x1", "x2"], [], (OMEGA, -OMEGA), "true"),
    ("(< (+ y (* 2 x)) 1)", ["x"], ["y"], (OMEGA,), "false"),
    ("(< y (- x (* 1000 x)))", ["x"], ["y"], (EPS,), "(< y 0)"),
    ("(and (< x1 y1) (< (+ y1 y2) x2) (= y2 (* 2 x1)))", ["x1", "x2"], ["y1", "y2"],
     (EPS, normalize(1 + EPS)), "false"),
])
def test_examples(text, xs, ys, a, expected):
    r = _define(text, xs, ys, a)
    assert to_sexp(simplify(r.instantiate())) == expected
    o = oracle_define_type(parse(text), xs, ys, a)
    assert equivalent(o.instantiate(), r.instantiate())


def test_slot_values_for_the_interval():
    r = _define("(and (< x1 y) (< y x2))", ["x1", "x2"], ["y"], (EPS, normalize(1 - EPS)))
    assert to_sexp(r.phi) == "(and (< y z_2) (< z_1 y))"
    assert r.omega == (0, 1) and r.tags == (1, -1)


def test_two_variable_cut_trace():
    r = _define("(< (+ y1 y2) x2)", ["x1", "x2"], ["y1", "y2"], (EPS, normalize(1 + EPS)))
    level = r.trace[0]
    assert (level.m, level.form) == (2, ">")
    assert level.detail["cuts"][0]["reverse"]
    assert equivalent(r.instantiate(), parse("(<= (+ y1 y2) 1)"))


def test_constant_cut_level():
    r = _define("(< x1 x2)", ["x1", "x2"], ["y"], (EPS, OMEGA))
    assert to_sexp(r.instantiate()) == "true"
    assert r.trace[0].detail["constant"] is True


def test_corrupted_strictness_is_caught():
    delta = parse("(< y x)")
    a = (normalize(1 + EPS),)
    good = define_type(delta, ["x"], ["y"], a)
    bad = replace(good, phi=map_atoms(good.phi, lambda at: make_atom(at.term, LT if at.op == LE else LE)))
    v = verify_equivalence(delta, ["x"], ["y"], a, good, bad)
    assert not v.ok and v.witness == (Fraction(1),)
    assert verify_equivalence(delta, ["x"], ["y"], a, good, oracle_define_type(delta, ["x"], ["y"], a))


def test_arity_errors():
    with pytest.raises(ArityError):
        _define("(< y x)", ["x"], ["y"], (EPS, EPS))
    with pytest.raises(ArityError):
        _define("(< y (+ x w))", ["x"], ["y"], (EPS,))
    with pytest.raises(ArityError):
        define_type(parse("(< y (+ x eps))"), ["x"], ["y"], (EPS,))


@settings(max_examples=40)
@given(seeds)
def test_matches_oracle_on_random_instances(seed):
    delta, xs, ys, a = random_instance(rng_of(seed))
    r = define_type(delta, xs, ys, a)
    o = oracle_define_type(delta, xs, ys, a)
    assert verify_equivalence(delta, xs, ys, a, r, o, n_random=40, seed=seed)


@settings(max_examples=40)
@given(seeds)
def test_standard_point_gives_the_restriction(seed):
    # at a standard a the type is just delta(a, y)
    rng = rng_of(seed)
    delta, xs, ys, _ = random_instance(rng)
    a = tuple(Fraction(rng.randint(-6, 6), rng.randint(1, 3)) for _ in xs)
    r = define_type(delta, xs, ys, a)
    assert equivalent(r.instantiate(), substitute(delta, {x: LinTerm.constant(v) for x, v in zip(xs, a)}))


@settings(max_examples=40)
@given(seeds)
def test_pointwise_truth(seed):
    rng = rng_of(seed)
    delta, xs, ys, a = random_instance(rng)
    r = define_type(delta, xs, ys, a)
    for _ in range(30):
        b = tuple(Fraction(rng.randint(-12, 12), rng.randint(1, 4)) for _ in ys)
        env = dict(zip(xs, a)) | dict(zip(ys, b))
        assert r.holds(b) == eval_star(delta, env)


@settings(max_examples=30)
@given(seeds)
def test_trace_levels_descend(seed):
    delta, xs, ys, a = random_instance(rng_of(seed))
    r = define_type(delta, xs, ys, a)
    assert all(1 <= lv.m <= len(xs) for lv in r.trace)
    assert all(lv.form == "base" for lv in r.trace if lv.m == 1)
    assert len(r.slots) == len(r.omega) == len(r.tags)
    assert all(is_standard(w) for w in r.omega)
