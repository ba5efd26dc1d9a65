"""Shipped orders and random instance generators."""
from __future__ import annotations

import random
from fractions import Fraction

from .formula import (
    FALSE, TRUE, Formula, LinTerm, conj, disj, eq, lt, le, make_atom, neg,
)
from .ordkit import DefLinOrder, lex_le, names
from .starnum import EPS, OMEGA, StarNum, normalize


def _unit_box(coords) -> Formula:
    return conj([conj(lt(0, c), lt(c, 1)) for c in coords])


def _points(coords, pts) -> Formula:
    return disj([conj([eq(LinTerm.var(c), v) for c, v in zip(coords, p)]) for p in pts])


def lex_square() -> DefLinOrder:
    u, v = names("u", 2), names("v", 2)
    return DefLinOrder(u, v, _unit_box(u), lex_le(u, v), "lex-square")


def lex_cube() -> DefLinOrder:
    u, v = names("u", 3), names("v", 3)
    return DefLinOrder(u, v, _unit_box(u), lex_le(u, v), "lex-cube")


def anti_diagonal() -> DefLinOrder:
    """(0,1)^2 ordered by u1 + u2, ties broken by u1."""
    u, v = names("u", 2), names("v", 2)
    su = LinTerm.var(u[0]) + LinTerm.var(u[1])
    sv = LinTerm.var(v[0]) + LinTerm.var(v[1])
    order = disj(lt(su, sv), conj(eq(su, sv), le(u[0], v[0])))
    return DefLinOrder(u, v, _unit_box(u), order, "anti-diagonal")


def padded_lex_square() -> DefLinOrder:
    """Lex square followed by the three isolated points (2,0), (3,0), (4,0)."""
    u, v = names("u", 2), names("v", 2)
    carrier = disj(_unit_box(u), _points(u, [(2, 0), (3, 0), (4, 0)]))
    return DefLinOrder(u, v, carrier, lex_le(u, v), "padded-lex-square")


def reverse_lex() -> DefLinOrder:
    """(0,1)^2 ordered lexicographically with the second coordinate first."""
    u, v = names("u", 2), names("v", 2)
    return DefLinOrder(u, v, _unit_box(u), lex_le(u[::-1], v[::-1]), "reverse-lex")


def lex_triangle() -> DefLinOrder:
    u, v = names("u", 2), names("v", 2)
    carrier = conj(lt(0, u[1]), lt(u[1], u[0]), lt(u[0], 1))
    return DefLinOrder(u, v, carrier, lex_le(u, v), "lex-triangle")


def padded_anti_diagonal() -> DefLinOrder:
    """Anti-diagonal order with isolated points (5,5) and (6,6) on top."""
    base = anti_diagonal()
    u = base.coords
    carrier = disj(base.carrier, _points(u, [(5, 5), (6, 6)]))
    return DefLinOrder(u, base.coords2, carrier, base.order, "padded-anti-diagonal")


def padded_line() -> DefLinOrder:
    """(0,1) followed by the isolated points 2, 3, 4 (dimension 1)."""
    u, v = names("u", 1), names("v", 1)
    carrier = disj(conj(lt(0, u[0]), lt(u[0], 1)), _points(u, [(2,), (3,), (4,)]))
    return DefLinOrder(u, v, carrier, le(u[0], v[0]), "padded-line")


def line(lo=None, hi=None) -> DefLinOrder:
    u, v = names("u", 1), names("v", 1)
    parts = []
    if lo is not None:
        parts.append(lt(lo, u[0]))
    if hi is not None:
        parts.append(lt(u[0], hi))
    return DefLinOrder(u, v, conj(parts), le(u[0], v[0]), "line")


def corpus() -> list[DefLinOrder]:
    """Orders of dimension >= 2 used by the certificate suites."""
    return [
        lex_square(), lex_cube(), anti_diagonal(), padded_lex_square(), reverse_lex(),
        lex_triangle(), padded_anti_diagonal(),
    ]


def by_name(name: str) -> DefLinOrder:
    table = {o.name: o for o in corpus() + [padded_line(), line()]}
    return table[name]


# ---------------------------------------------------------------------------
# Random generators


def random_star(rng: random.Random, standard_range: int = 3) -> StarNum | Fraction:
    """A star number from the families q, q +- eps, +-omega, and small combinations."""
    q = Fraction(rng.randint(-2 * standard_range, 2 * standard_range), 2)
    kind = rng.randrange(6)
    if kind == 0:
        return q
    if kind == 1:
        return normalize(q + EPS * rng.choice([1, -1]))
    if kind == 2:
        return normalize(OMEGA * rng.choice([1, -1]))
    if kind == 3:
        return normalize(q + EPS * rng.choice([1, -1, 2, Fraction(-1, 3)]) + StarNum({-2: rng.choice([0, 1, -1])}))
    if kind == 4:
        return normalize(OMEGA * rng.choice([1, -1]) + q + EPS * rng.choice([0, 1, -1]))
    return normalize(q + EPS * rng.choice([1, -1]) * rng.randint(1, 3))


def random_term(rng: random.Random, vars_, coef=5, const=True, density=0.6) -> LinTerm:
    while True:
        coeffs = {v: rng.randint(-coef, coef) for v in vars_ if rng.random() < density}
        t = LinTerm(coeffs, rng.randint(-coef, coef) if const else 0)
        if not t.is_ground():
            return t


def random_atom(rng, vars_, coef=5) -> Formula:
    op = rng.choice(["<", "<=", "=", "<", "<="])
    while True:
        a = make_atom(random_term(rng, vars_, coef), op)
        if a is not TRUE and a is not FALSE:
            return a


def random_qf(rng, vars_, n_atoms, coef=5) -> Formula:
    """Random boolean combination of n_atoms atoms over vars_."""
    items = [random_atom(rng, vars_, coef) for _ in range(n_atoms)]
    while len(items) > 1:
        i = rng.randrange(len(items) - 1)
        a, b = items[i], items[i + 1]
        r = rng.random()
        if r < 0.45:
            c = conj(a, b)
        elif r < 0.9:
            c = disj(a, b)
        else:
            c = neg(conj(a, b))
        if rng.random() < 0.15:
            c = neg(c)
        items[i:i + 2] = [c]
    return items[0]


__all__ = [
    "lex_square", "lex_cube", "anti_diagonal", "padded_lex_square", "reverse_lex", "lex_triangle",
    "padded_anti_diagonal", "padded_line", "line", "corpus", "by_name", "random_star",
    "random_term", "random_atom", "random_qf",
]
