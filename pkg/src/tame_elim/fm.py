"""Fourier-Motzkin elimination over conjunctions of linear atoms.

Used for exact feasibility (with a witness point), projection of conjunctions,
and as the second, independent existential-elimination engine next to virtual
substitution.  Constants may be star numbers; only linear operations are
applied to them.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator

from .formula import (
    EQ, FALSE, LE, LT, TRUE, And, Atom, LinTerm, Not, Or, conj, disj, make_atom, is_quantifier_free,
)
from .starnum import sign


class Infeasible(Exception):
    pass


def _tighten(atoms: Iterable) -> list[Atom]:
    """Drop duplicates and dominated parallel inequalities; raise on ground falsity."""
    best: dict = {}
    eqs: dict = {}
    for a in atoms:
        if a is TRUE:
            continue
        if a is FALSE:
            raise Infeasible
        key = a.term.coeffs
        k = a.term.const
        if a.op == EQ:
            prev = eqs.get(key)
            if prev is not None and prev != k:
                raise Infeasible
            eqs[key] = k
            continue
        strict = a.op == LT
        prev = best.get(key)
        if prev is None or k > prev[0] or (k == prev[0] and strict and not prev[1]):
            best[key] = (k, strict)
    for key in list(best):
        if key not in best or key[0][1] < 0:
            continue
        opp = tuple((v, -c) for v, c in key)
        other = best.get(opp)
        if other is None:
            continue
        # t + k1 (<|<=) 0 and -t + k2 (<|<=) 0, i.e. -k2 <= t <= -k1
        (k1, s1), (k2, s2) = best[key], other
        d = sign(k1 + k2)
        if d > 0 or (d == 0 and (s1 or s2)):
            raise Infeasible
        if d == 0:
            del best[key], best[opp]
            prev = eqs.get(key)
            if prev is not None and prev != k1:
                raise Infeasible
            eqs[key] = k1
    out = []
    for key, k in eqs.items():
        out.append(Atom(LinTerm(key, k), EQ))
        ineq = best.pop(key, None)
        if ineq is not None:
            # t + k = 0 forces t = -k, so t + k2 (<|<=) 0 is ground
            d = ineq[0] - k
            s = sign(d)
            if s > 0 or (s == 0 and ineq[1]):
                raise Infeasible
    for key, (k, strict) in best.items():
        out.append(Atom(LinTerm(key, k), LT if strict else LE))
    return out


def _bounds(atoms, x):
    """Split atoms by their role for x: (equalities, lowers, uppers, rest)."""
    eqs, lowers, uppers, rest = [], [], [], []
    for a in atoms:
        c = a.term.coeff(x)
        if not c:
            rest.append(a)
            continue
        b = a.term.without(x).scale(-1 / c)  # the value of x on the boundary
        if a.op == EQ:
            eqs.append(b)
        elif c > 0:
            uppers.append((b, a.op == LT))
        else:
            lowers.append((b, a.op == LT))
    return eqs, lowers, uppers, rest


def _subst_all(atoms, x, t):
    out = []
    for a in atoms:
        if x in a.term.cmap:
            r = make_atom(a.term.substitute({x: t}), a.op)
            if r is FALSE:
                raise Infeasible
            if r is not TRUE:
                out.append(r)
        else:
            out.append(a)
    return out


def eliminate(atoms: list[Atom], x: str, trail: list | None = None) -> list[Atom]:
    """Project x out of a conjunction; raises Infeasible when it is empty."""
    eqs, lowers, uppers, rest = _bounds(atoms, x)
    if eqs:
        t = min(eqs, key=lambda b: (len(b.coeffs), str(b)))
        if trail is not None:
            trail.append(("eq", x, t))
        return _tighten(_subst_all(atoms, x, t))
    if trail is not None:
        trail.append(("ineq", x, lowers, uppers))
    new = list(rest)
    for lo, s1 in lowers:
        for hi, s2 in uppers:
            r = make_atom(lo - hi, LT if (s1 or s2) else LE)
            if r is FALSE:
                raise Infeasible
            if r is not TRUE:
                new.append(r)
    return _tighten(new)


def _cost(atoms, x):
    eqs, lowers, uppers, _ = _bounds(atoms, x)
    if eqs:
        return -1
    return len(lowers) * len(uppers) - len(lowers) - len(uppers)


def project(atoms: Iterable[Atom], xs: Iterable[str]) -> list[Atom] | None:
    """Conjunction over the remaining variables equivalent to  exists xs. atoms  (None if empty)."""
    try:
        cur = _tighten(atoms)
        todo = [x for x in dict.fromkeys(xs)]
        while todo:
            todo = [x for x in todo if any(x in a.term.cmap for a in cur)]
            if not todo:
                break
            x = min(todo, key=lambda v: (_cost(cur, v), v))
            todo.remove(x)
            cur = eliminate(cur, x)
        return cur
    except Infeasible:
        return None


def _pick(lowers, uppers, env):
    lo = hi = None
    lo_strict = hi_strict = False
    for b, s in lowers:
        v = b.evaluate(env)
        if lo is None or v > lo or (v == lo and s):
            lo, lo_strict = v, s
    for b, s in uppers:
        v = b.evaluate(env)
        if hi is None or v < hi or (v == hi and s):
            hi, hi_strict = v, s
    if lo is None and hi is None:
        return Fraction(0)
    if hi is None:
        return lo + 1 if lo_strict else lo
    if lo is None:
        return hi - 1 if hi_strict else hi
    if lo == hi:
        return lo
    return (lo + hi) / 2


def witness(atoms: Iterable[Atom], order: Iterable[str] | None = None) -> dict | None:
    """A point satisfying the conjunction, or None if it is infeasible."""
    try:
        cur = _tighten(atoms)
    except Infeasible:
        return None
    vars_ = set()
    for a in cur:
        vars_ |= a.term.vars
    trail: list = []
    todo = sorted(vars_) if order is None else [v for v in order if v in vars_]
    todo += sorted(vars_ - set(todo))
    try:
        while todo:
            x = min(todo, key=lambda v: (_cost(cur, v), v))
            todo.remove(x)
            if any(x in a.term.cmap for a in cur):
                cur = eliminate(cur, x, trail)
            else:
                trail.append(("ineq", x, [], []))
    except Infeasible:
        return None
    for a in cur:
        if not a.holds({}):
            return None
    env: dict = {}
    for step in reversed(trail):
        if step[0] == "eq":
            _, x, t = step
            env[x] = t.evaluate(env)
        else:
            _, x, lowers, uppers = step
            env[x] = _pick(lowers, uppers, env)
    return env


def feasible(atoms: Iterable[Atom]) -> bool:
    return _feasible(frozenset(atoms))


@lru_cache(maxsize=1 << 18)
def _feasible(key: frozenset) -> bool:
    try:
        cur = _tighten(key)
    except Infeasible:
        return False
    vars_ = set()
    for a in cur:
        vars_ |= a.term.vars
    return project(cur, vars_) is not None


# ---------------------------------------------------------------------------
# Disjunctive normal form with feasibility pruning


class DNFLimit(Exception):
    pass


def split_weak(a: Atom):
    if isinstance(a, Atom) and a.op == LE:
        return Or((make_atom(a.term, LT), make_atom(a.term, EQ)))
    return a


def _negs(a: Atom, open_cells: bool) -> list[Atom]:
    t = a.term
    if a.op == LT:
        if open_cells:
            return [make_atom(-t, LT), make_atom(t, EQ)]
        return [make_atom(-t, LE)]
    if a.op == LE:
        return [make_atom(-t, LT)]
    return [make_atom(t, LT), make_atom(-t, LT)]


def _add(piece: list, extra: Iterable) -> list | None:
    try:
        cand = _tighten(list(piece) + list(extra))
    except Infeasible:
        return None
    return cand if feasible(cand) else None


def _dedupe(pieces: list) -> list:
    seen = {}
    for p in pieces:
        seen.setdefault(frozenset(p), p)
    keys = sorted(seen, key=len)
    kept: list[frozenset] = []
    for k in keys:
        if any(q <= k for q in kept):
            continue
        kept.append(k)
    return [seen[k] for k in kept]


def _product(xs: list, ys: list, limit) -> list:
    out = []
    for x in xs:
        for y in ys:
            c = _add(x, y)
            if c is not None:
                out.append(c)
                if limit is not None and len(out) > 4 * limit:
                    out = _dedupe(out)
                    if len(out) > limit:
                        raise DNFLimit
    return _dedupe(out)


def subtract(pieces: list, cut: list, open_cells: bool = False) -> list:
    """Pieces of (union of pieces) minus the conjunction cut; the new pieces are disjoint from it."""
    out = []
    for x in pieces:
        if _add(x, cut) is None:
            out.append(x)
            continue
        prefix: list = []
        for a in cut:
            for n in _negs(a, open_cells):
                c = _add(x, prefix + [n])
                if c is not None:
                    out.append(c)
            prefix.append(a)
    return out


def complement(pieces: list, open_cells: bool = False) -> list:
    res: list = [[]]
    for p in pieces:
        res = subtract(res, p, open_cells)
        if not res:
            break
    return _dedupe(res)


def dnf_list(f, *, open_cells: bool = False, limit: int | None = None) -> list[list[Atom]]:
    """Feasible conjunctions whose union is the quantifier-free formula f.

    With ``open_cells`` weak inequalities are split into < or =, so every
    conjunction describes a relatively open polyhedron.
    """
    if not is_quantifier_free(f):
        raise ValueError("dnf needs a quantifier-free formula")
    memo: dict = {}

    def go(g):
        hit = memo.get(g)
        if hit is not None:
            return hit
        if g is TRUE:
            r = [[]]
        elif g is FALSE:
            r = []
        elif isinstance(g, Atom):
            if open_cells and g.op == LE:
                r = [[make_atom(g.term, LT)], [make_atom(g.term, EQ)]]
            else:
                r = [[g]]
        elif isinstance(g, And):
            kids = sorted((go(a) for a in g.args), key=len)
            r = [[]]
            for k in kids:
                r = _product(r, k, limit)
                if not r:
                    break
        elif isinstance(g, Or):
            r = []
            for a in g.args:
                r.extend(go(a))
            r = _dedupe(r)
        elif isinstance(g, Not):
            r = complement(go(g.arg), open_cells)
        else:
            raise ValueError(f"unexpected formula {g!r}")
        if limit is not None and len(r) > limit:
            raise DNFLimit
        memo[g] = r
        return r

    return go(f)


def dnf(f, *, open_cells: bool = False, prune: bool = True, limit: int | None = None) -> Iterator[list[Atom]]:
    yield from dnf_list(f, open_cells=open_cells, limit=limit)


def conj_formula(atoms: Iterable[Atom]):
    return conj(list(atoms))


def fm_exists(xs, f):
    """exists xs. f via DNF and Fourier-Motzkin; the result is quantifier-free."""
    xs = list(xs)
    parts = []
    for atoms in dnf(f, prune=False):
        p = project(atoms, xs)
        if p is not None:
            parts.append(conj(p))
    return disj(parts)
