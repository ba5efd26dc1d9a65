"""Exact evaluation of quantified formulas at rational points, without quantifier elimination.

For a quantifier over x whose body mentions the inner bound variables I, the
truth of the body as x moves can only change at values of x pinned down by
some set of at most |I|+1 atom hyperplanes.  Trying those critical values, the
midpoints between them, and one point beyond each end therefore decides the
quantifier exactly.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Mapping

from .formula import (
    And, Atom, Exists, Forall, Formula, FormulaError, Not, Or, TRUE, FALSE, atoms,
)


def bound_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, (Exists, Forall)):
        return frozenset(f.vars) | bound_vars(f.body)
    if isinstance(f, Not):
        return bound_vars(f.arg)
    if isinstance(f, (And, Or)):
        out = frozenset()
        for g in f.args:
            out |= bound_vars(g)
        return out
    return frozenset()


# Compiled nodes: True/False, ("atom", op, const, {var: coeff}), ("and"|"or", [nodes]),
# ("not", node), ("E"|"A", var, body).  Values are substituted one variable at a
# time, folding atoms that become ground.


def _compile(f: Formula):
    if f is TRUE:
        return True
    if f is FALSE:
        return False
    if isinstance(f, Atom):
        return ("atom", f.op, Fraction(f.term.const), {v: Fraction(c) for v, c in f.term.coeffs})
    if isinstance(f, Not):
        return ("not", _compile(f.arg))
    if isinstance(f, (And, Or)):
        return ("and" if isinstance(f, And) else "or", [_compile(g) for g in f.args])
    if isinstance(f, (Exists, Forall)):
        node = _compile(f.body)
        for v in reversed(f.vars):
            node = ("E" if isinstance(f, Exists) else "A", v, node)
        return node
    raise TypeError(f"cannot evaluate {type(f).__name__}")


def _atom_truth(op: str, k: Fraction) -> bool:
    return k < 0 if op == "<" else (k <= 0 if op == "<=" else k == 0)


def _assign(node, x: str, v: Fraction):
    if node is True or node is False:
        return node
    tag = node[0]
    if tag == "atom":
        _, op, k, cs = node
        c = cs.get(x)
        if c is None:
            return node
        k = k + c * v
        if len(cs) == 1:
            return _atom_truth(op, k)
        return ("atom", op, k, {w: d for w, d in cs.items() if w != x})
    if tag == "not":
        r = _assign(node[1], x, v)
        return (not r) if isinstance(r, bool) else ("not", r)
    if tag in ("and", "or"):
        absorb = tag == "or"
        kids = []
        for g in node[1]:
            r = _assign(g, x, v)
            if r is absorb:
                return absorb
            if r is not (not absorb):
                kids.append(r)
        if not kids:
            return not absorb
        return kids[0] if len(kids) == 1 else (tag, kids)
    if node[1] == x:  # x is rebound here
        return node
    r = _assign(node[2], x, v)
    return r if isinstance(r, bool) else (tag, node[1], r)


def _rows(node, out: list):
    if node is True or node is False:
        return
    tag = node[0]
    if tag == "atom":
        out.append(node)
    elif tag == "not":
        _rows(node[1], out)
    elif tag in ("and", "or"):
        for g in node[1]:
            _rows(g, out)
    else:
        _rows(node[2], out)


def _bound(node, out: set):
    if node is True or node is False or node[0] == "atom":
        return
    if node[0] == "not":
        _bound(node[1], out)
    elif node[0] in ("and", "or"):
        for g in node[1]:
            _bound(g, out)
    else:
        out.add(node[1])
        _bound(node[2], out)


def _pinned(rows: list[dict], inner: list[str], x: str) -> Fraction | None:
    """Value of x forced by the equations sum(row[v]*v) + row[1] = 0, if any."""
    cols = inner + [x]
    m = [dict(r) for r in rows]
    piv_row = 0
    for c in cols:
        k = next((i for i in range(piv_row, len(m)) if m[i].get(c, 0)), None)
        if k is None:
            continue
        m[piv_row], m[k] = m[k], m[piv_row]
        p = m[piv_row]
        lead = p[c]
        for i in range(len(m)):
            if i != piv_row and m[i].get(c, 0):
                f = m[i][c] / lead
                m[i] = {v: m[i].get(v, 0) - f * p.get(v, 0) for v in set(m[i]) | set(p)}
        piv_row += 1
    for r in m:
        if any(r.get(v, 0) for v in inner):
            continue
        cx = r.get(x, 0)
        if cx:
            return -r.get(1, 0) / cx
        if r.get(1, 0):
            return None  # inconsistent
    return None


def _critical(body, x: str) -> list[Fraction]:
    inner_set: set = set()
    _bound(body, inner_set)
    inner_set.discard(x)
    inner = sorted(inner_set)
    atoms_: list = []
    _rows(body, atoms_)
    rows, seen = [], set()
    for _, _, k, cs in atoms_:
        if x not in cs and not (inner_set & cs.keys()):
            continue
        key = (k, tuple(sorted(cs.items())))
        if key not in seen:
            seen.add(key)
            rows.append({1: k, **cs})
    vals = set()
    if not inner:
        for r in rows:
            vals.add(-r[1] / r[x])
        return sorted(vals)
    for k in range(1, min(len(rows), len(inner) + 1) + 1):
        for sub in combinations(rows, k):
            if not any(x in r for r in sub):
                continue
            v = _pinned(list(sub), inner, x)
            if v is not None:
                vals.add(v)
    return sorted(vals)


def critical_values(body: Formula, x: str, env: Mapping[str, Fraction]) -> list[Fraction]:
    """Values of x at which the truth of body (other free variables at env) may change."""
    node = _compile(body)
    for v, val in env.items():
        node = _assign(node, v, val)
    return [] if isinstance(node, bool) else _critical(node, x)


def candidates(crit: list[Fraction]) -> list[Fraction]:
    if not crit:
        return [Fraction(0)]
    out = [crit[0] - 1]
    for p, q in zip(crit, crit[1:]):
        out += [p, (p + q) / 2]
    out += [crit[-1], crit[-1] + 1]
    return out


def _eval(node) -> bool:
    if node is True or node is False:
        return node
    tag = node[0]
    if tag == "atom":
        raise FormulaError(f"unassigned variables {sorted(node[3])}")
    if tag == "not":
        return not _eval(node[1])
    if tag == "and":
        return all(_eval(g) for g in node[1])
    if tag == "or":
        return any(_eval(g) for g in node[1])
    x, body = node[1], node[2]
    want = tag == "E"
    for v in candidates(_critical(body, x)):
        if _eval(_assign(body, x, v)) == want:
            return want
    return not want


def brute_eval(f: Formula, env: Mapping[str, Fraction]) -> bool:
    """Truth of f at the rational point env (every free variable must be assigned)."""
    node = _compile(f)
    for v in sorted(f.free_vars):
        if v not in env:
            raise FormulaError(f"unassigned variable {v}")
        node = _assign(node, v, Fraction(env[v]))
    return _eval(node)


def endpoint_grid(f: Formula, xs, first=(Fraction(-1), Fraction(0), Fraction(1, 3), Fraction(2))) -> list[dict]:
    """Points whose last coordinate runs over the critical values of f (and gaps) given the others."""
    xs = list(xs)
    if not xs:
        return [{}]
    pts = [{}]
    for i, x in enumerate(xs):
        nxt = []
        for env in pts:
            if i == len(xs) - 1:
                crit = set()
                for a in atoms(f):
                    c = a.term.coeff(x)
                    if c and a.term.vars <= set(env) | {x}:
                        rest = a.term.without(x).evaluate(env) if a.term.vars - {x} else a.term.const
                        crit.add(Fraction(-rest / c))
                vals = candidates(sorted(crit))
            else:
                vals = list(first)
            nxt += [{**env, x: v} for v in vals]
        pts = nxt
    return pts


__all__ = ["brute_eval", "critical_values", "candidates", "bound_vars", "endpoint_grid"]
