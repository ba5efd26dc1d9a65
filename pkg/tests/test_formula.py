from fractions import Fraction

import pytest
from hypothesis import given

from conftest import rng_of, seeds
from tame_elim.corpus import random_qf, random_term
from tame_elim import formula as F
from tame_elim.starnum import EPS, StarNum, lift
from tame_elim.syntax import ParseError, parse, to_sexp

VARS = ["a", "b", "x", "y"]


def random_point(rng, vars_=VARS):
    return {v: Fraction(rng.randint(-12, 12), rng.randint(1, 4)) for v in vars_}


def test_parse_atom_normal_form():
    f = parse("(< (+ x (* 3/2 y)) 2)")
    assert isinstance(f, F.Atom) and f.op == F.LT
    assert f.term.coeffs == (("x", 1), ("y", Fraction(3, 2)))
    assert f.term.const == -2


def test_parse_quantifier_and_star_constant():
    f = parse("(exists (u) (and (< a u) (< u b)))")
    assert isinstance(f, F.Exists) and f.vars == ("u",)
    assert f.free_vars == {"a", "b"}
    g = parse("(< x eps)")
    assert isinstance(g.term.const, StarNum) and g.term.const == -EPS


def test_sugar_and_normalization():
    assert to_sexp(parse("(> x (* 2 y))")) == "(< (* 2 y) x)"
    assert to_sexp(parse("(= (* 2 x) 4)")) == "(= x 2)"
    assert parse("(>= x y)") == parse("(<= y x)")


@pytest.mark.parametrize("text", ["(< x", "(foo x)", "(< x y z)", "(exists x (< x 1))", "(* x y)", ")"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse(text)


def test_evaluate_examples():
    f = parse("(< x 2)")
    assert F.evaluate(f, {"x": Fraction(3, 2)})
    assert not F.evaluate(f, {"x": Fraction(2)})
    assert F.evaluate(parse("(< x eps)"), {"x": lift(0)})


def test_substitute_examples():
    assert F.substitute(parse("(< x y)"), {"x": F.LinTerm.var("y") + 1}) is F.FALSE
    f = parse("(and (< x y) (<= 0 x))")
    assert F.substitute(f, {}) == f
    g = F.substitute(parse("(exists (u) (< u x))"), {"x": F.LinTerm.var("u")})
    assert g.free_vars == {"u"}
    assert isinstance(g, F.Exists) and g.vars != ("u",)


def test_nnf_examples_and_free_vars():
    assert to_sexp(F.nnf(parse("(not (< a b))"))) == "(<= b a)"
    assert to_sexp(F.nnf(parse("(not (= a b))"))) == "(or (< a b) (< b a))"
    assert parse("(exists (u) (< u x))").free_vars == {"x"}


@given(seeds)
def test_print_parse_round_trip(seed):
    rng = rng_of(seed)
    f = random_qf(rng, VARS, rng.randint(1, 7))
    g = parse(to_sexp(f))
    for _ in range(100):
        p = random_point(rng)
        assert F.evaluate(f, p) == F.evaluate(g, p)


@given(seeds)
def test_substitution_lemma(seed):
    rng = rng_of(seed)
    f = random_qf(rng, VARS, rng.randint(1, 6))
    sigma = {v: random_term(rng, VARS) for v in rng.sample(VARS, 2)}
    g = F.substitute(f, sigma)
    for _ in range(30):
        p = random_point(rng)
        q = dict(p)
        q.update({v: t.evaluate(p) for v, t in sigma.items()})
        assert F.evaluate(g, p) == F.evaluate(f, q)


@given(seeds)
def test_nnf_sound(seed):
    rng = rng_of(seed)
    f = F.neg(random_qf(rng, VARS, rng.randint(1, 6)))
    g = F.nnf(f)
    assert not any(isinstance(x, F.Not) for x in _walk(g))
    for _ in range(30):
        p = random_point(rng)
        assert F.evaluate(f, p) == F.evaluate(g, p)


@given(seeds)
def test_atoms_normalized(seed):
    rng = rng_of(seed)
    for a in F.atoms(random_qf(rng, VARS, 6)):
        lead = a.term.coeffs[0][1]
        assert lead == 1 if a.op == F.EQ else abs(lead) == 1
        assert all(c != 0 for _, c in a.term.coeffs)


@given(seeds)
def test_cached_free_vars(seed):
    rng = rng_of(seed)
    f = random_qf(rng, VARS, 5)
    assert f.free_vars == frozenset().union(*(a.term.vars for a in F.atoms(f)))


def _walk(f):
    yield f
    for attr in ("args",):
        for g in getattr(f, attr, ()):
            yield from _walk(g)
    if hasattr(f, "arg"):
        yield from _walk(f.arg)
    if hasattr(f, "body"):
        yield from _walk(f.body)
