from fractions import Fraction

from hypothesis import given

from conftest import rng_of, seeds
from tame_elim.bruteforce import brute_eval, candidates, critical_values, endpoint_grid
from tame_elim.formula import EQ, LE, LT, evaluate, make_atom, map_atoms
from tame_elim.qe import qe
from tame_elim.selftest import random_quantified
from tame_elim.syntax import parse


def test_critical_values_one_level():
    body = parse("(and (< (* 2 x) 1) (<= 3 x))")
    assert critical_values(body, "x", {}) == [Fraction(1, 2), Fraction(3)]
    assert candidates([Fraction(0)]) == [-1, 0, 1]


def test_critical_values_see_inner_vertices():
    # truth of  exists y (x < y < 1 - x)  flips at x = 1/2, where the two bounds meet
    body = parse("(exists (y) (and (< x y) (< y (- 1 x))))")
    assert Fraction(1, 2) in critical_values(body, "x", {})


def test_brute_eval_examples():
    assert brute_eval(parse("(forall (a) (exists (u) (< a u)))"), {})
    assert not brute_eval(parse("(exists (u) (and (< 0 u) (< u a)))"), {"a": Fraction(0)})
    assert brute_eval(parse("(exists (u) (and (< 0 u) (< u a)))"), {"a": Fraction(1, 100)})
    assert brute_eval(parse("(exists (u) (= (* 3 u) a))"), {"a": Fraction(1)})


def _flip(a):
    if a.op == EQ:
        return make_atom(a.term, LT)
    return make_atom(a.term, LE if a.op == LT else LT)


@given(seeds)
def test_brute_force_catches_corrupted_output(seed):
    # flipping the strictness of every atom of a correct answer must be caught
    # whenever the flipped formula really differs on the probe grid
    rng = rng_of(seed)
    f = random_quantified(rng)
    g = qe(f)
    bad = map_atoms(g, _flip)
    pts = endpoint_grid(bad, sorted(f.free_vars))
    if any(evaluate(bad, p) != evaluate(g, p) for p in pts):
        assert any(brute_eval(f, p) != evaluate(bad, p) for p in pts)
