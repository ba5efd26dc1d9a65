from fractions import Fraction

from hypothesis import given

from conftest import fractions, nonzero, star_numbers
from tame_elim.starnum import (
    EPS, NEG_INF, OMEGA, POS_INF, infinitesimal_sign, lift, normalize, star_compare, std,
)
from tame_elim.syntax import parse_star, read_one


def test_std_examples():
    assert std(normalize(3 + 5 * EPS)) == 3
    assert std(normalize(OMEGA - 7)) == POS_INF
    assert std(normalize(-EPS)) == 0
    assert std(normalize(-OMEGA + 100)) == NEG_INF


def test_compare_examples():
    assert EPS < Fraction(1, 10**6)
    for q in (Fraction(10**9), Fraction(-3), Fraction(0)):
        assert OMEGA > q
    assert star_compare(normalize(1 + EPS), Fraction(1)) == ">"
    assert star_compare(EPS, EPS) == "="


def test_star_literal_syntax():
    assert parse_star(read_one("(star (0 3) (-1 5))")) == normalize(3 + 5 * EPS)
    assert parse_star(read_one("eps")) == EPS
    assert parse_star(read_one("omega")) == OMEGA


def test_no_zero_coefficients_stored():
    a = normalize(1 + EPS - EPS)
    assert a == 1
    assert all(c != 0 for c in lift(normalize(OMEGA + EPS - OMEGA)).terms.values())


@given(star_numbers, star_numbers, star_numbers)
def test_total_order(a, b, c):
    a, b, c = lift(a), lift(b), lift(c)
    assert (a < b) + (a == b) + (b < a) == 1
    if a <= b and b <= c:
        assert a <= c
    assert (a + c < b + c) == (a < b)


@given(fractions, fractions)
def test_embedding_preserves_order_and_sum(p, q):
    assert (lift(p) < lift(q)) == (p < q)
    assert lift(p) + lift(q) == lift(p + q)


@given(star_numbers, star_numbers)
def test_std_monotone(a, b):
    key = {NEG_INF: (-1, 0), POS_INF: (1, 0)}

    def k(v):
        return key.get(v, (0, v))

    if lift(a) <= lift(b):
        assert k(std(a)) <= k(std(b))


@given(star_numbers, star_numbers, nonzero)
def test_std_additive_on_finite(a, b, q):
    sa, sb = std(a), std(b)
    if sa in (POS_INF, NEG_INF) or sb in (POS_INF, NEG_INF):
        return
    assert std(normalize(lift(a) + lift(b))) == sa + sb
    assert std(normalize(lift(a) * q)) == q * sa


@given(star_numbers)
def test_std_total_and_sign_split(a):
    s = std(a)
    if s in (POS_INF, NEG_INF):
        return
    d = normalize(lift(a) - s)
    # what is left after removing the standard part is infinitesimal
    assert -Fraction(1, 10**9) < d < Fraction(1, 10**9) or d == 0
    assert infinitesimal_sign(a) == (0 if d == 0 else (1 if d > 0 else -1))
