from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tame_elim.corpus import anti_diagonal, corpus, lex_cube, lex_square, padded_line
from tame_elim.formula import conj, evaluate, le
from tame_elim.ordkit import (
    DefLinOrder, ReduceError, check_linear_order, collapse_finite_intervals, interval_dim_relation,
    iota_coordinatize, iota_injective, is_identity_relation, quotient_reduce, reduce_chain,
)
from tame_elim.qe import equivalent
from tame_elim.syntax import parse


@pytest.mark.parametrize("P", corpus(), ids=lambda P: P.name)
def test_corpus_orders_are_linear(P):
    assert check_linear_order(P).ok


def test_first_coordinate_is_not_an_order():
    P = lex_square()
    bad = DefLinOrder(P.coords, P.coords2, P.carrier, le("u1", "v1"))
    chk = check_linear_order(bad)
    assert not chk.ok and chk.failed == "antisymmetric"
    w = chk.witness
    assert w["a_1"] == w["b_1"] and w["a_2"] != w["b_2"]


def test_collapse_examples():
    assert collapse_finite_intervals(lex_square()).identity
    col = collapse_finite_intervals(padded_line())
    assert not col.identity
    # the three isolated points form one finite interval and collapse to a single representative
    assert equivalent(col.target.carrier, parse("(or (= u1 2) (and (< 0 u1) (< u1 1)))"))


def test_lex_relations():
    P = lex_square()
    box = conj(P.member(P.coords), P.member(P.coords2))
    assert equivalent(interval_dim_relation(P, 1), conj(box, parse("(and (= u1 v1) (= u2 v2))")))
    assert equivalent(interval_dim_relation(P, 2), conj(box, parse("(= u1 v1)")))
    assert equivalent(interval_dim_relation(P, 3), box)
    assert is_identity_relation(P, interval_dim_relation(P, 1))


def test_quotient_of_lex_square():
    q = quotient_reduce(lex_square())
    assert q.ok and q.dim_target == 1
    assert equivalent(q.target.carrier, parse("(and (< 0 u1) (< u1 1) (= u2 1/2))"))
    assert q.rho_at((Fraction(1, 3), Fraction(9, 10))) == (Fraction(1, 3), Fraction(1, 2))


def test_threshold_one_does_not_drop_dimension():
    q = quotient_reduce(lex_square(), threshold=1)
    assert not q.certificates["dim_drop"]


def test_quotient_of_anti_diagonal():
    q = quotient_reduce(anti_diagonal())
    assert q.ok and q.dim_target == 1


def test_reduce_needs_dimension_two():
    with pytest.raises(ReduceError):
        quotient_reduce(padded_line())


def test_lex_cube_chain():
    chain = reduce_chain(lex_cube())
    assert len(chain) == 2 and all(q.ok for q in chain)
    assert [q.dim_target for q in chain] == [2, 1]


def test_iota_injective_on_lex_square():
    io = iota_coordinatize(quotient_reduce(lex_square()))
    assert io.N == 1 and iota_injective(io)


_Q = quotient_reduce(lex_square())
halves = st.builds(Fraction, st.integers(1, 19), st.just(20))


@settings(max_examples=40)
@given(halves, halves, halves, halves)
def test_rho_is_monotone_on_points(a1, a2, b1, b2):
    P = _Q.source
    a, b = (a1, a2), (b1, b2)
    env = dict(zip(P.coords, a)) | dict(zip(P.coords2, b))
    if evaluate(P.order, env):
        ra, rb = _Q.rho_at(a), _Q.rho_at(b)
        assert evaluate(P.order, dict(zip(P.coords, ra)) | dict(zip(P.coords2, rb)))
