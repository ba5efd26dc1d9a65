from fractions import Fraction

import pytest
from hypothesis import given

from conftest import rng_of, seeds
from tame_elim.cells import (
    EMPTY, UnboundedError, cell_decompose, check_decomposition, definable_choice, dim,
    fiber_dim_partition, mu_function,
)
from tame_elim.corpus import corpus, random_qf
from tame_elim.formula import LinTerm, conj, disj, exists, forall, implies, substitute
from tame_elim.qe import decide, equivalent
from tame_elim.syntax import parse, term_sexp, to_sexp


@pytest.mark.parametrize("text,coords,expected", [
    ("(and (< 0 u) (< u 1) (= v u))", ["u", "v"], 1),
    ("(and (< 0 u) (< u 1) (< 0 v) (< v 1))", ["u", "v"], 2),
    ("(and (= u 0) (= u 1))", ["u"], EMPTY),
    ("(= u 3)", ["u"], 0),
])
def test_dim_examples(text, coords, expected):
    assert dim(parse(text), coords) == expected


@pytest.mark.parametrize("P", corpus()[:3], ids=lambda P: P.name)
def test_dim_invariance(P):
    d = dim(P.carrier, P.coords)
    assert dim(P.carrier, P.coords[::-1]) == d
    u = P.coords[0]
    moved = substitute(P.carrier, {u: LinTerm.var(u).scale(2) + 1})
    assert dim(moved, P.coords) == d


def test_cell_examples():
    cells = cell_decompose(parse("(< y x)"), ["x", "y"])
    assert [(to_sexp(c.formula), c.dim) for c in cells] == [("(< y x)", 2)]
    cells = cell_decompose(parse("(or (= y x) (and (< x y) (< y (+ x 1))))"), ["x", "y"])
    assert sorted(c.dim for c in cells) == [1, 2]


def test_cells_split_at_the_peak():
    f = parse("(and (< 0 x) (< x 1) (< 0 y) (< y x) (< y (- 1 x)))")
    cells = cell_decompose(f, ["x", "y"])
    assert check_decomposition(f, cells) == (True, True)
    assert any(to_sexp(c.formula).startswith("(and (= x 1/2)") for c in cells)


@given(seeds)
def test_decomposition_partitions(seed):
    rng = rng_of(seed)
    f = random_qf(rng, ["x", "y"], rng.randint(1, 5), coef=3)
    assert check_decomposition(f, cell_decompose(f, ["x", "y"])) == (True, True)


def test_fiber_dim_examples():
    got = fiber_dim_partition(parse("(and (< 0 u) (< u x))"), ["u"])
    assert [(to_sexp(g), d) for g, d in got] == [("(<= x 0)", EMPTY), ("(< 0 x)", 1)]
    assert [(to_sexp(g), d) for g, d in fiber_dim_partition(parse("(= u x)"), ["u"])] == [("true", 0)]
    got = fiber_dim_partition(parse("(and (= x 0) (< 0 u) (< u 1))"), ["u"])
    assert [d for _, d in got] == [EMPTY, 1]
    assert equivalent(got[1][0], parse("(= x 0)"))


@pytest.mark.parametrize("text,value", [
    ("(and (<= x u) (<= u (+ x 1)))", "x"),
    ("(and (< x u) (< u (+ x 2)))", "(+ x 1)"),
    ("(< x u)", "(+ x 1)"),
])
def test_choice_examples(text, value):
    m = definable_choice(parse(text), ["u"])
    (guard, v), = m.all_pieces()
    assert to_sexp(guard) == "true" and term_sexp(v[0]) == value


@given(seeds)
def test_choice_picks_members(seed):
    rng = rng_of(seed)
    f = random_qf(rng, ["x", "u", "v"], rng.randint(1, 5), coef=3)
    m = definable_choice(f, ["u", "v"])
    g = m.graph(["cu", "cv"])
    chosen = substitute(f, {"u": LinTerm.var("cu"), "v": LinTerm.var("cv")})
    nonempty = exists(["u", "v"], f)
    assert decide(forall(["x"], implies(nonempty, exists(["cu", "cv"], conj(g, chosen)))))


def test_mu_examples():
    m = mu_function(parse("(and (< 0 t) (< t x))"), "t")
    assert [(to_sexp(g), str(v)) for g, v in m.all_pieces()] == [("(<= x 0)", "0"), ("(< 0 x)", "x")]
    m = mu_function(parse("(or (and (< 0 t) (< t 1)) (and (< 2 t) (< t 5)) (= t 7))"), "t")
    assert m.at({}) == 4
    # overlapping pieces are not counted twice
    m = mu_function(parse("(or (and (< 0 t) (< t x)) (and (< (* 1/2 x) t) (< t x)))"), "t")
    for x in (Fraction(1), Fraction(7, 3)):
        assert m.at({"x": x}) == x


def test_mu_unbounded():
    with pytest.raises(UnboundedError):
        mu_function(parse("(< x t)"), "t")


def _bounded(rng):
    parts = []
    for _ in range(rng.randint(1, 3)):
        c = Fraction(rng.randint(-8, 8), 2)
        parts.append(conj(parse(f"(< {c} t)"), parse(f"(< t {c + Fraction(rng.randint(1, 6), 2)})")))
    return disj(parts)


@given(seeds)
def test_mu_finitely_additive(seed):
    rng = rng_of(seed)
    A, B = _bounded(rng), _bounded(rng)

    def mu(f):
        return mu_function(f, "t").at({}) or 0

    assert mu(disj(A, B)) + mu(conj(A, B)) == mu(A) + mu(B)


@given(seeds)
def test_cell_dims_agree_with_dim(seed):
    rng = rng_of(seed)
    f = random_qf(rng, ["x", "y"], rng.randint(1, 5), coef=3)
    cells = [c for c in cell_decompose(f, ["x", "y"]) if c.dim is not EMPTY]
    d = dim(f, ["x", "y"])
    assert (max(c.dim for c in cells) if cells else EMPTY) == d
