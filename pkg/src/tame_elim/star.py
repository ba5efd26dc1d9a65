"""Working with sets defined by formulas whose constants live in M*.

The basic fact used throughout: a standard point p and a star constant s
compare the same way as p compares with std(s), except when p = std(s), where
the infinitesimal sign of s decides.  ``standard_trace`` applies this atom by
atom; ``standard_points_1d`` gets the same answer for one-variable sets from
endpoint analysis alone, and is used as its cross-check.
"""
from __future__ import annotations

from fractions import Fraction
from dataclasses import dataclass
from typing import Mapping

from .cells import UnboundedError, bounds
from .formula import (
    EQ, FALSE, LE, LT, TRUE, Atom, Formula, LinTerm, conj, disj, eq, evaluate, fresh_name,
    is_quantifier_free, lt, make_atom, map_atoms, substitute,
)
from .qe import qe, simplify
from .starnum import NEG_INF, POS_INF, StarNum, infinitesimal_sign, is_standard, lift, normalize, std


def eval_star(f: Formula, point: Mapping[str, object]) -> bool:
    """Exact truth of f in M* at a point whose entries may be rationals or star numbers."""
    if not is_quantifier_free(f):
        f = qe(substitute(f, {v: LinTerm.constant(point[v]) for v in f.free_vars if v in point}))
        point = {}
    env = {v: lift(val) for v, val in point.items() if v in f.free_vars}
    return evaluate(f, env)


def mu_star(f: Formula, t: str) -> StarNum | Fraction:
    """Total length of the bounded one-variable star set {t : f}.

    The set is constant between consecutive endpoints, so a sweep that tests
    one midpoint per gap is exact.
    """
    f = f if is_quantifier_free(f) else qe(f)
    extra = f.free_vars - {t}
    if extra:
        raise ValueError(f"mu_star: unexpected free variables {sorted(extra)}")
    ends = sorted({lift(b.const) for b in bounds(f, t)})
    if not ends:
        if evaluate(f, {t: StarNum()}):
            raise UnboundedError("unbounded set has no finite measure")
        return Fraction(0)

    def member(v) -> bool:
        return evaluate(f, {t: v})

    if member(ends[0] - 1) or member(ends[-1] + 1):
        raise UnboundedError("unbounded set has no finite measure")
    total = StarNum()
    for lo, hi in zip(ends, ends[1:]):
        if member((lo + hi) / 2):
            total = total + (hi - lo)
    return normalize(total)


def convert_atom(a: Atom) -> Formula:
    """Standard atom true at exactly the standard points where a holds."""
    s = a.term.const
    if not isinstance(s, StarNum) or s.is_standard():
        return a
    sd = std(s)
    if sd == POS_INF:
        return FALSE
    if sd == NEG_INF:
        return FALSE if a.op == EQ else TRUE
    lin = LinTerm(a.term.coeffs, sd)
    iota = infinitesimal_sign(s)
    if a.op == EQ:
        return FALSE
    # lin + iota*delta (<|<=) 0 with delta a positive infinitesimal
    return make_atom(lin, LT if iota > 0 else LE)


def standard_trace(f: Formula) -> Formula:
    """Standard formula agreeing with f on all standard points."""
    if not is_quantifier_free(f):
        f = qe(f)
    return map_atoms(f, convert_atom)


@dataclass
class SlotConversion:
    """A standard formula E over slots + coordinates with E(omega, .) = f(env, .) on standard points."""

    formula: Formula
    slots: tuple
    omega: tuple
    tags: tuple


def _tag(s) -> object:
    sd = std(s)
    if sd == POS_INF:
        return "+inf"
    if sd == NEG_INF:
        return "-inf"
    return infinitesimal_sign(s)


def slot_convert(
    f: Formula, params, env: Mapping[str, object], prefix: str = "z", used: set | None = None, force: bool = False
) -> SlotConversion:
    """Replace every parameter-dependent or star constant of f by a standard slot.

    Each atom lin(coords) + c(params) (<|<=|=) 0 is read at the star value
    s = c(env); its slot holds std(s) and the atom is converted by the sign
    of s - std(s).  The tags (one per slot) fix the shape of the result.
    With ``force`` standard constants get slots too.
    """
    f = f if is_quantifier_free(f) else qe(f)
    params = set(params)
    slot_of: dict = {}
    omega: list = []
    tags: list = []
    names: list = []
    used = used if used is not None else set()
    used |= f.free_vars

    def slot(c: LinTerm):
        if c not in slot_of:
            val = c.evaluate(env)
            name = fresh_name(prefix, used)
            used.add(name)
            slot_of[c] = (name, val)
            names.append(name)
            tag = _tag(val)
            tags.append(tag)
            sd = std(val)
            omega.append(Fraction(sd) if tag not in ("+inf", "-inf") else None)
        return slot_of[c]

    def conv(a: Atom) -> Formula:
        lin = LinTerm([(v, k) for v, k in a.term.coeffs if v not in params])
        c = LinTerm([(v, k) for v, k in a.term.coeffs if v in params], a.term.const)
        if c.is_ground() and is_standard(c.const) and not (force and lin.coeffs):
            return a
        if lin.is_ground():
            return make_atom(LinTerm.constant(c.evaluate(env)), a.op)
        name, val = slot(c)
        tag = tags[names.index(name)]
        if tag == "+inf":
            return FALSE
        if tag == "-inf":
            return FALSE if a.op == EQ else TRUE
        term = lin + LinTerm.var(name)
        if tag == 0:
            return make_atom(term, a.op)
        if a.op == EQ:
            return FALSE
        return make_atom(term, LT if tag > 0 else LE)

    out = map_atoms(f, conv)
    # unused slots (an infinite value) still occupy a position; give them 0
    omega = [Fraction(0) if w is None else w for w in omega]
    return SlotConversion(out, tuple(names), tuple(omega), tuple(tags))


def standard_points_1d(f: Formula, t: str, tidy: bool = True) -> Formula:
    """The standard part B ∩ M of a one-variable star set B = {t : f}, via endpoint analysis."""
    f = f if is_quantifier_free(f) else qe(f)
    extra = f.free_vars - {t}
    if extra:
        raise ValueError(f"standard_points_1d: unexpected free variables {sorted(extra)}")
    stds = sorted({std(b.const) for b in bounds(f, t)} - {POS_INF, NEG_INF})
    stds = [Fraction(s) for s in stds]

    def member(q) -> bool:
        return eval_star(f, {t: q})

    tv = LinTerm.var(t)
    parts = []
    if not stds:
        return TRUE if member(Fraction(0)) else FALSE
    if member(stds[0] - 1):
        parts.append(lt(tv, stds[0]))
    if member(stds[-1] + 1):
        parts.append(lt(stds[-1], tv))
    for s in stds:
        if member(s):
            parts.append(eq(tv, s))
    for a, b in zip(stds, stds[1:]):
        if member((a + b) / 2):
            parts.append(conj(lt(a, tv), lt(tv, b)))
    out = disj(parts)
    return simplify(out) if tidy else out


def standard_endpoints(f: Formula, t: str) -> list:
    """std values of the star endpoints of {t : f}, sorted, infinities dropped."""
    return sorted({std(b.const) for b in bounds(f, t)} - {POS_INF, NEG_INF})


__all__ = [
    "eval_star", "mu_star", "convert_atom", "standard_trace", "standard_points_1d",
    "standard_endpoints", "std", "infinitesimal_sign", "slot_convert", "SlotConversion",
]
