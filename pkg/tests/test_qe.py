from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given

from conftest import rng_of, seeds
from tame_elim.bruteforce import brute_eval
from tame_elim.corpus import random_qf
from tame_elim.formula import Forall, evaluate, iff, is_quantifier_free, neg
from tame_elim.qe import (
    FreeVariableError, decide, equivalent, fm_qe, is_satisfiable, qe, randomized_order, satisfiable,
    simplify,
)
from tame_elim.selftest import check_qe_instance, random_quantified
from tame_elim.syntax import parse, to_sexp


def test_density():
    assert to_sexp(simplify(qe(parse("(exists (u) (and (< a u) (< u b)))")))) == "(< a b)"


def test_divisibility():
    assert to_sexp(simplify(qe(parse("(exists (u) (and (= (* 2 u) y) (< 0 u)))")))) == "(< 0 y)"


def test_universal_implication_against_grid():
    f = parse("(forall (u) (or (not (< u a)) (< u b)))")
    g = simplify(qe(f))
    assert to_sexp(g) == "(<= a b)"
    grid = [Fraction(k, 2) for k in range(-10, 11)]
    for a, b, u in product(grid, grid, grid):
        # the instance at u must hold wherever the eliminated formula does
        if evaluate(g, {"a": a, "b": b}):
            assert not (u < a) or u < b
    for a, b in product(grid, grid):
        assert evaluate(g, {"a": a, "b": b}) == brute_eval(f, {"a": a, "b": b})


@pytest.mark.parametrize("text,value", [
    ("(forall (a) (exists (u) (< a u)))", True),
    ("(exists (u) (< u u))", False),
    ("(and (< 0 eps) (< eps 1/1000000))", True),
    ("(exists (x) (and (< 0 x) (< x eps)))", True),
    ("(forall (x) (or (< x omega) (= x omega) (< omega x)))", True),
])
def test_decide_examples(text, value):
    assert decide(parse(text)) is value


def test_decide_rejects_free_variables():
    with pytest.raises(FreeVariableError):
        decide(parse("(< x 1)"))


def test_satisfiable_witness():
    f = parse("(and (< 1 x) (< x y) (<= y 2))")
    w = satisfiable(f)
    assert w is not None and evaluate(f, w)
    assert satisfiable(parse("(and (< x 1) (< 2 x))")) is None


@given(seeds)
def test_qe_sound_against_brute_force(seed):
    assert check_qe_instance(random_quantified(rng_of(seed))) is None


@given(seeds)
def test_closure_checked_with_second_order(seed):
    rng = rng_of(seed)
    f = random_quantified(rng)
    g = qe(f)
    assert is_quantifier_free(g)
    closure = Forall(tuple(sorted(f.free_vars)), iff(f, g)) if f.free_vars else iff(f, g)
    assert is_quantifier_free(qe(closure, randomized_order(seed)))
    assert evaluate(qe(closure, randomized_order(seed)), {})
    assert equivalent(g, qe(f, randomized_order(seed + 1)))


@given(seeds)
def test_fm_and_vs_agree(seed):
    f = random_quantified(rng_of(seed))
    assert equivalent(qe(f), fm_qe(f))


@given(seeds)
def test_simplify_preserves_meaning(seed):
    rng = rng_of(seed)
    f = random_qf(rng, ["a", "b", "c"], rng.randint(1, 8))
    g = simplify(f)
    assert equivalent(f, g)
    assert len(to_sexp(g)) <= len(to_sexp(f)) or not is_satisfiable(neg(iff(f, g)))


@given(seeds)
def test_decide_matches_brute_force_on_sentences(seed):
    rng = rng_of(seed)
    f = random_quantified(rng)
    sentence = Forall(tuple(sorted(f.free_vars)), f) if f.free_vars else f
    assert decide(sentence) == brute_eval(sentence, {})
