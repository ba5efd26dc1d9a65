"""Quantifier elimination and decision for divisible ordered abelian groups.

The main engine is virtual substitution: to eliminate x from a quantifier-free
formula, it is enough to try x = -inf, every equality/weak lower bound of x, and
every strict lower bound plus an infinitesimal (or the mirror image with upper
bounds).  The infinitesimal and the infinities are handled symbolically, so the
output mentions only linear combinations of the input terms, and star constants
stay star constants.
"""
from __future__ import annotations

import itertools
import random
from typing import Iterable

from . import fm
from .formula import (
    EQ, FALSE, LE, LT, TRUE, And, Atom, Exists, Forall, Formula, FormulaError, LinTerm,
    Not, Or, _Const, _Quant, atoms, conj, disj, evaluate, fresh_name, is_quantifier_free,
    make_atom, map_atoms, neg, nnf, rename,
)


class FreeVariableError(FormulaError):
    pass


# ---------------------------------------------------------------------------
# Virtual substitution


def _classify(f: Formula, x: str):
    eqs, weak_lo, strict_lo, weak_hi, strict_hi = {}, {}, {}, {}, {}
    for a in atoms(f):
        c = a.term.coeff(x)
        if not c:
            continue
        b = a.term.without(x).scale(-1 / c)
        if a.op == EQ:
            eqs[b] = None
        elif a.op == LE:
            (weak_hi if c > 0 else weak_lo)[b] = None
        else:
            (strict_hi if c > 0 else strict_lo)[b] = None
    return list(eqs), list(weak_lo), list(strict_lo), list(weak_hi), list(strict_hi)


def _virtual(f: Formula, x: str, t: LinTerm | None, direction: int) -> Formula:
    """f[x := t + direction*eps], or x := direction*inf when t is None."""

    def sub(a: Atom):
        c = a.term.coeff(x)
        if not c:
            return a
        if t is None:
            # c*x dominates: its sign is sign(c) * direction
            s = (1 if c > 0 else -1) * direction
            if a.op == EQ:
                return FALSE
            return TRUE if s < 0 else FALSE
        if direction == 0:
            return make_atom(a.term.substitute({x: t}), a.op)
        g = a.term.substitute({x: t})
        if a.op == EQ:
            return FALSE
        s = (1 if c > 0 else -1) * direction
        # g + s*eps (<|<=) 0
        return make_atom(g, LT if s > 0 else LE)

    return map_atoms(f, sub)


def _vs_conjunct(x: str, f: Formula) -> Formula:
    # an equality conjunct pins x down (Gaussian step)
    parts = f.args if isinstance(f, And) else (f,)
    for p in parts:
        if isinstance(p, Atom) and p.op == EQ and p.term.coeff(x):
            t = p.term.without(x).scale(-1 / p.term.coeff(x))
            return _virtual(f, x, t, 0)
    eqs, wl, sl, wh, sh = _classify(f, x)
    if len(wl) + len(sl) <= len(wh) + len(sh):
        cands = [(None, -1)] + [(t, 0) for t in eqs + wl] + [(t, 1) for t in sl]
    else:
        cands = [(None, 1)] + [(t, 0) for t in eqs + wh] + [(t, -1) for t in sh]
    out = []
    for t, d in cands:
        g = _virtual(f, x, t, d)
        if g is TRUE:
            return TRUE
        out.append(g)
    return disj(out)


def vs_exists(x: str, f: Formula) -> Formula:
    """Quantifier-free equivalent of  exists x. f  for quantifier-free f."""
    if x not in f.free_vars:
        return f
    f = nnf(f)
    if isinstance(f, Or):
        return disj([vs_exists(x, g) for g in f.args])
    if isinstance(f, And):
        inner = [g for g in f.args if x in g.free_vars]
        outer = [g for g in f.args if x not in g.free_vars]
        if outer:
            return conj(outer + [vs_exists(x, conj(inner))])
    return _vs_conjunct(x, f)


def qe(f: Formula, order=None) -> Formula:
    """Quantifier-free formula equivalent to f (over every DOAG).

    ``order`` optionally permutes the elimination order inside each quantifier
    block (a callable taking and returning a list of variable names).
    """
    if isinstance(f, (Atom, _Const)):
        return f
    if isinstance(f, Not):
        return neg(qe(f.arg, order))
    if isinstance(f, And):
        return conj([qe(a, order) for a in f.args])
    if isinstance(f, Or):
        return disj([qe(a, order) for a in f.args])
    if isinstance(f, _Quant):
        body = qe(f.body, order)
        vs = list(reversed(f.vars))
        if order is not None:
            vs = order(vs)
        if isinstance(f, Exists):
            for v in vs:
                body = vs_exists(v, body)
            return body
        body = neg(body)
        for v in vs:
            body = vs_exists(v, body)
        return neg(body)
    raise FormulaError(f"unknown formula {f!r}")


qe_eliminate = qe


def fm_qe(f: Formula) -> Formula:
    """Second elimination engine: DNF + Fourier-Motzkin for each existential block."""
    if isinstance(f, (Atom, _Const)):
        return f
    if isinstance(f, Not):
        return neg(fm_qe(f.arg))
    if isinstance(f, And):
        return conj([fm_qe(a) for a in f.args])
    if isinstance(f, Or):
        return disj([fm_qe(a) for a in f.args])
    if isinstance(f, Exists):
        return fm.fm_exists(f.vars, fm_qe(f.body))
    if isinstance(f, Forall):
        return neg(fm.fm_exists(f.vars, neg(fm_qe(f.body))))
    raise FormulaError(f"unknown formula {f!r}")


# ---------------------------------------------------------------------------
# Satisfiability and decision


def _strip_existentials(f: Formula, used: set) -> Formula | None:
    """Drop existential quantifiers of an NNF formula (renaming apart); None if a forall occurs."""
    if isinstance(f, (Atom, _Const)):
        return f
    if isinstance(f, (And, Or)):
        parts = []
        for a in f.args:
            p = _strip_existentials(a, used)
            if p is None:
                return None
            parts.append(p)
        return conj(parts) if isinstance(f, And) else disj(parts)
    if isinstance(f, Exists):
        ren = {}
        for v in f.vars:
            w = fresh_name(v, used) if v in used else v
            used.add(w)
            if w != v:
                ren[v] = w
        body = rename(f.body, ren) if ren else f.body
        return _strip_existentials(body, used)
    return None


def satisfiable(f: Formula, order: Iterable[str] | None = None) -> dict | None:
    """A point satisfying f (free variables read existentially), or None."""
    g = f if is_quantifier_free(f) else nnf(f)
    if not is_quantifier_free(g):
        used = set(g.free_vars)
        h = _strip_existentials(g, used)
        if h is None:
            h = qe(g)
        g = h
    for conjunct in fm.dnf(g):
        w = fm.witness(conjunct, order)
        if w is not None:
            env = {v: w.get(v, 0) for v in f.free_vars}
            from .starnum import normalize

            env = {v: normalize(val) for v, val in env.items()}
            return env
    return None


def is_satisfiable(f: Formula) -> bool:
    g = f if is_quantifier_free(f) else nnf(f)
    if not is_quantifier_free(g):
        used = set(g.free_vars)
        h = _strip_existentials(g, used)
        g = h if h is not None else qe(g)
    return bool(fm.dnf_list(g))


def is_valid(f: Formula) -> bool:
    return not is_satisfiable(neg(f))


def _polarity_free(f: Formula) -> str | None:
    """'exists' / 'forall' if every quantifier of NNF(f) has that kind."""
    kinds = set()

    def walk(g):
        if isinstance(g, Exists):
            kinds.add("exists")
            walk(g.body)
        elif isinstance(g, Forall):
            kinds.add("forall")
            walk(g.body)
        elif isinstance(g, (And, Or)):
            for a in g.args:
                walk(a)

    walk(f)
    if len(kinds) > 1:
        return None
    return kinds.pop() if kinds else "exists"


def decide(sentence: Formula) -> bool:
    """Truth of a sentence over DOAG (rational or star constants)."""
    if sentence.free_vars:
        raise FreeVariableError(f"free variables: {sorted(sentence.free_vars)}")
    g = nnf(sentence)
    kind = _polarity_free(g)
    if kind == "exists":
        return is_satisfiable(g)
    if kind == "forall":
        return not is_satisfiable(nnf(neg(g)))
    r = qe(g)
    return evaluate(r, {})


def decide_closure(f: Formula) -> bool:
    """Truth of the universal closure of f."""
    return decide(Forall(tuple(sorted(f.free_vars)), f)) if f.free_vars else decide(f)


def equivalent(f: Formula, g: Formula) -> bool:
    return not is_satisfiable(disj(conj(f, neg(g)), conj(neg(f), g)))


def randomized_order(seed: int):
    rng = random.Random(seed)

    def order(vs):
        vs = list(vs)
        rng.shuffle(vs)
        return vs

    return order


# ---------------------------------------------------------------------------
# Simplification


def simplify(f: Formula, limit: int = 400) -> Formula:
    """Semantic simplification of a quantifier-free formula through its DNF.

    Infeasible disjuncts are removed, implied atoms are dropped inside each
    disjunct and disjuncts contained in another one are discarded.  Formulas
    whose DNF exceeds ``limit`` disjuncts are returned unchanged.
    """
    if not is_quantifier_free(f):
        f = qe(f)
    try:
        pieces = fm.dnf_list(f, limit=limit)
    except fm.DNFLimit:
        return f
    cleaned = []
    for piece in pieces:
        keep = list(piece)
        for a in list(keep):
            rest = [b for b in keep if b is not a]
            if not any(fm.feasible(rest + [n]) for n in _negations(a)):
                keep = rest
        cleaned.append(keep)
    cleaned.sort(key=len)
    kept: list[list] = []
    for c in cleaned:
        if any(_contains(k, c) for k in kept):
            continue
        kept = [k for k in kept if not _contains(c, k)]
        kept.append(c)
    kept = _merge_weak(kept)
    if len(kept) <= 40:
        kept = _merge_pairs(kept)
    return disj([conj(c) for c in kept])


def _fuse(x: Atom, y: Atom):
    """Atom covering x or y on a common hyperplane, None if they cover everything, False if no fuse."""
    if x.term == y.term and {x.op, y.op} == {LT, EQ}:
        return make_atom(x.term, LE)
    if x.term == -y.term and x.op != EQ and y.op != EQ and LE in (x.op, y.op):
        return None
    if x.op == EQ and y.op == LT and -x.term == y.term:
        return make_atom(y.term, LE)
    if y.op == EQ and x.op == LT and -y.term == x.term:
        return make_atom(x.term, LE)
    return False


def _merge_pairs(terms: list[list]) -> list[list]:
    """Replace two disjuncts by one when a fused conjunction is exactly their union."""
    terms = [list(t) for t in terms]
    changed = True
    while changed:
        changed = False
        for i, j in itertools.combinations(range(len(terms)), 2):
            A, B = terms[i], terms[j]
            for x in A:
                if x in B:
                    continue
                for y in B:
                    if y in A or not y.term.coeffs or {v for v, _ in x.term.coeffs} != {v for v, _ in y.term.coeffs}:
                        continue
                    fused = _fuse(x, y)
                    if fused is False:
                        continue
                    cand = [a for a in A if a is not x] + [b for b in B if b is not y and b not in A]
                    if fused is not None:
                        cand.append(fused)
                    if _same_union(cand, A, B):
                        terms = [t for k, t in enumerate(terms) if k not in (i, j)] + [sorted(set(cand), key=str)]
                        changed = True
                        break
                if changed:
                    break
            if changed:
                break
    return terms


def _same_union(cand: list, A: list, B: list) -> bool:
    if not (_contains(cand, A) and _contains(cand, B)):
        return False
    rest = [cand]
    for piece in (A, B):
        rest = fm.subtract(rest, piece)
    return not rest


def _contains(big: list, small: list) -> bool:
    """Every point of the conjunction small satisfies the conjunction big."""
    return all(not any(fm.feasible(small + [n]) for n in _negations(a)) for a in big)


def _merge_weak(terms: list[list]) -> list[list]:
    """Fuse  R & t<0  with  R & t=0  into  R & t<=0, and  R & t<0  with  R & t>=0  into  R."""
    sets = [frozenset(t) for t in terms]
    changed = True
    while changed:
        changed = False
        for i, j in itertools.permutations(range(len(sets)), 2):
            a, b = sets[i] - sets[j], sets[j] - sets[i]
            if len(a) != 1 or len(b) != 1:
                continue
            (x,), (y,) = a, b
            if x.op == LT and y.op == EQ and y.term in (x.term, -x.term):
                merged = (sets[i] - a) | {make_atom(x.term, LE)}
            elif x.op == LT and y.op == LE and y.term == -x.term:
                merged = sets[i] - a
            else:
                continue
            sets = [s for k, s in enumerate(sets) if k not in (i, j)]
            if not any(s <= merged for s in sets):
                sets = [s for s in sets if not merged <= s] + [merged]
            changed = True
            break
    return [sorted(s, key=str) for s in sets]


def _negations(a: Atom) -> list[Atom]:
    n = nnf(neg(a))
    return list(n.args) if isinstance(n, Or) else [n]
