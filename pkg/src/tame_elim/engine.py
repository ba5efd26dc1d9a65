"""Defining schemes for types over M realized in M*.

For a standard formula delta(x; y) and a star point a, ``define_type`` builds
a standard formula phi(z; y) and a rational tuple Omega with

    M* |= delta(a, b)   iff   M |= phi(Omega, b)     for every standard b.

It works by induction on the length of x.  The last variable x_m enters each
atom as  x_m ~ f(x', y)  with f linear; the relation f(a', y1) <= f(a', y2)
is a total quasi-order on the y's, its classes get canonical representatives,
and the set {b : f(a', b) <= a_m} becomes a cut in the induced order, handled
by ``cut_definable``.  ``oracle_define_type`` is an independent, much shorter
construction (convert each atom through the standard part of its constant)
used as the cross-check.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cells import definable_choice
from .cutdef import CutSpec, cut_definable, is_cut
from .formula import (
    EQ, FALSE, LT, TRUE, Atom, Formula, FormulaError, LinTerm, atoms, conj, disj, eq, evaluate, exists,
    le, lt, map_atoms, neg, nnf, substitute,
)
from .ordkit import DefLinOrder, check_linear_order, names
from .qe import is_satisfiable, qe, satisfiable, simplify
from .star import eval_star, slot_convert
from .starnum import StarNum, is_standard, lift, normalize, std


class ArityError(FormulaError):
    pass


class CertificateError(RuntimeError):
    pass


@dataclass
class TypeDefResult:
    phi: Formula               # over slots + ys
    omega: tuple               # one rational per slot
    slots: tuple
    ys: tuple
    tags: tuple = ()
    trace: list = field(default_factory=list)

    def instantiate(self) -> Formula:
        """phi(Omega, y), a standard formula in y."""
        return substitute(self.phi, {z: LinTerm.constant(w) for z, w in zip(self.slots, self.omega)})

    def holds(self, b: Sequence) -> bool:
        env = dict(zip(self.slots, self.omega))
        env.update(zip(self.ys, b))
        return evaluate(self.phi, {v: env[v] for v in self.phi.free_vars})


def _prep(delta: Formula, xs, ys, a):
    xs, ys = tuple(xs), tuple(ys)
    if len(a) != len(xs):
        raise ArityError(f"point has {len(a)} entries for {len(xs)} x-variables")
    extra = delta.free_vars - set(xs) - set(ys)
    if extra:
        raise ArityError(f"free variables outside x and y: {sorted(extra)}")
    for at in atoms(delta):
        if not is_standard(at.term.const):
            raise ArityError("delta must be standard; star values enter through a")
    return xs, ys, tuple(normalize(v) if not isinstance(v, StarNum) else normalize(v) for v in a)


def _qf(delta: Formula) -> Formula:
    from .formula import is_quantifier_free

    return nnf(delta if is_quantifier_free(delta) else qe(delta))


# ---------------------------------------------------------------------------
# Oracle


def oracle_define_type(delta: Formula, xs, ys, a) -> TypeDefResult:
    """Atomwise conversion: each atom's x-part is evaluated at a and replaced by a standard slot."""
    xs, ys, a = _prep(delta, xs, ys, a)
    f = _qf(delta)
    conv = slot_convert(f, xs, dict(zip(xs, a)), used=set(ys))
    return TypeDefResult(conv.formula, conv.omega, conv.slots, ys, conv.tags, [{"oracle": True}])


# ---------------------------------------------------------------------------
# The induction


@dataclass
class _Level:
    m: int
    atom: str
    form: str
    detail: dict = field(default_factory=dict)


class Engine:
    """Holds slot names and caches shared by one define_type call tree."""

    def __init__(self, check: bool = True):
        self.check = check
        self.used: set = set()
        self.slots: list = []
        self.omega: list = []
        self.tags: list = []
        self.trace: list = []
        self._orders: dict = {}

    # slots -----------------------------------------------------------------

    def _slot(self, value) -> tuple[str, object]:
        """A fresh slot for the star value; returns (name, tag)."""
        from .formula import fresh_name
        from .star import _tag

        name = fresh_name("z", self.used)
        self.used.add(name)
        tag = _tag(value)
        sd = std(value)
        self.slots.append(name)
        self.omega.append(Fraction(0) if tag in ("+inf", "-inf") else Fraction(sd))
        self.tags.append(tag)
        return name, tag

    def _absorb(self, triples):
        for name, w, tag in triples:
            self.slots.append(name)
            self.omega.append(w)
            self.tags.append(tag)

    # main ------------------------------------------------------------------

    def define(self, delta: Formula, xs, ys, a) -> TypeDefResult:
        xs, ys, a = _prep(delta, xs, ys, a)
        self.used |= set(ys) | set(xs)
        f = _qf(delta)
        phi = self._formula(f, xs, ys, a)
        return TypeDefResult(simplify(phi), tuple(self.omega), tuple(self.slots), ys, tuple(self.tags), self.trace)

    def _formula(self, f: Formula, xs, ys, a) -> Formula:
        if not xs:
            return f
        return map_atoms(f, lambda at: self._atom(at, xs, ys, a))

    def _atom(self, at: Atom, xs, ys, a) -> Formula:
        m = len(xs)
        xm = xs[-1]
        c = at.term.coeff(xm)
        if not c:
            if not (at.term.vars & set(xs)):
                return at
            self.trace.append(_Level(m, str(at), "X"))
            return self._formula(at, xs[:-1], ys, a[:-1])
        if m == 1:
            return self._base(at, xm, ys, a[0])
        return self._cut_atom(at, xs, ys, a)

    # m = 1 -------------------------------------------------------------------

    def _base(self, at: Atom, x: str, ys, val) -> Formula:
        """x ~ l(y) at the star value of x, with one slot for std(val)."""
        c = at.term.coeff(x)
        l = at.term.without(x).scale(Fraction(-1) / c)   # atom:  c*(x - l) op 0
        self.trace.append(_Level(1, str(at), "base"))
        kind = _kind(at, c)
        if not l.vars:
            return TRUE if eval_star(_cmp(LinTerm.constant(val), kind, l), {}) else FALSE
        name, tag = self._slot(val)
        z = LinTerm.var(name)
        if tag == "+inf":
            return TRUE if kind in (">", ">=") else FALSE
        if tag == "-inf":
            return TRUE if kind in ("<", "<=") else FALSE
        # val = z + iota*delta with delta a positive infinitesimal
        if kind == "=":
            return eq(l, z) if tag == 0 else FALSE
        if kind in ("<", "<="):
            # val < l  (or <=):  standard l compared with z
            if tag == 0:
                return _cmp(z, kind, l)
            return lt(z, l) if tag > 0 else le(z, l)
        if tag == 0:
            return _cmp(z, kind, l)
        return le(l, z) if tag > 0 else lt(l, z)

    # m >= 2 --------------------------------------------------------------------

    def _order(self, h: LinTerm, ys, reverse: bool):
        """Representatives of the level sets of h on M^n, ordered by h (or its reverse)."""
        key = (h, ys, reverse)
        hit = self._orders.get(key)
        if hit is not None:
            return hit
        n = len(ys)
        y1, y2 = names("ya_", n), names("yb_", n)
        h1 = h.rename(dict(zip(ys, y1)))
        h2 = h.rename(dict(zip(ys, y2)))
        same = eq(h1, h2)
        rep = definable_choice(same, y2)
        # rep maps y1 to a point of the class; A is its image
        graph = rep.graph(y2)
        carrier = simplify(substitute(graph, dict(zip(y2, map(LinTerm.var, y1)))))
        order = le(h2, h1) if reverse else le(h1, h2)
        A = DefLinOrder(y1, y2, carrier, order, "reps" + ("-rev" if reverse else ""))
        hit = (A, rep, y1, y2)
        self._orders[key] = hit
        return hit

    def _quasi_order_ok(self, gamma: Formula, y1, y2) -> bool:
        y3 = names("yc_", len(y1))
        g12 = gamma
        g23 = substitute(gamma, {**dict(zip(y1, map(LinTerm.var, y2))), **dict(zip(y2, map(LinTerm.var, y3)))})
        g13 = substitute(gamma, dict(zip(y2, map(LinTerm.var, y3))))
        g21 = substitute(gamma, {**dict(zip(y1, map(LinTerm.var, y2))), **dict(zip(y2, map(LinTerm.var, y1)))})
        trans = not is_satisfiable(conj(g12, g23, neg(g13)))
        total = not is_satisfiable(conj(neg(g12), neg(g21)))
        return trans and total

    def _cut_atom(self, at: Atom, xs, ys, a) -> Formula:
        m = len(xs)
        xm = xs[-1]
        c = at.term.coeff(xm)
        f = at.term.without(xm).scale(Fraction(-1) / c)   # atom is  c*(x_m - f) op 0
        h = LinTerm([(v, k) for v, k in f.coeffs if v in ys])
        kind = _kind(at, c)
        level = _Level(m, str(at), kind)
        self.trace.append(level)
        n = len(ys)
        if n == 0 or not h.coeffs:
            fa = f.substitute({x: LinTerm.constant(v) for x, v in zip(xs, a)})
            truth = eval_star(_cmp(LinTerm.constant(a[-1]), kind, fa), {})
            level.detail["constant"] = truth
            return TRUE if truth else FALSE
        need_1 = kind in ("<", ">=", "=")   # f <= a_m
        need_2 = kind in ("<=", ">", "=")   # a_m <= f
        parts = {}
        for which, reverse in ((1, False), (2, True)):
            if (which == 1 and not need_1) or (which == 2 and not need_2):
                continue
            parts[which] = self._cut_part(f, h, xs, ys, a, reverse, level)
        if kind == "<":
            return neg(parts[1])
        if kind == ">=":
            return parts[1]
        if kind == "<=":
            return parts[2]
        if kind == ">":
            return neg(parts[2])
        return conj(parts[1], parts[2])

    def _cut_part(self, f: LinTerm, h: LinTerm, xs, ys, a, reverse: bool, level: _Level) -> Formula:
        """Standard formula in slots + ys for f(a', y) <= a_m (reverse: a_m <= f(a', y))."""
        xhat = xs[:-1]
        A, rep, y1, y2 = self._order(h, ys, reverse)
        # comparison formula and its definition through the induction
        g1 = f.rename(dict(zip(ys, y1)))
        g2 = f.rename(dict(zip(ys, y2)))
        gamma = le(g1, g2)
        sub = Engine(check=False)
        sub.used = set(self.used)
        C = sub._formula(_qf(gamma), xhat, y1 + y2, a[:-1])
        if self.check:
            if not self._quasi_order_ok(C, y1, y2):
                raise CertificateError("comparison relation is not a total quasi-order")
            if not check_linear_order(A):
                raise CertificateError("representative order is not linear")
        # the star cut on A
        star = {x: LinTerm.constant(v) for x, v in zip(xs, a)}
        fa = g1.substitute(star)
        am = LinTerm.constant(a[-1])
        V = le(am, fa) if reverse else le(fa, am)
        spec = CutSpec(A, V)
        if self.check:
            chk = is_cut(spec)
            if not chk:
                raise CertificateError(f"star set is not a cut of the representative order: {chk.witness}")
        res = cut_definable(spec, check=False, slots=self.used)
        self._absorb(res.omega)
        level.detail.setdefault("cuts", []).append({"reverse": reverse, "W": str(res.W), "omega": res.omega})
        # b is in the part iff its representative is in the cut
        graph = rep.graph(y2)
        graph = substitute(graph, dict(zip(y1, map(LinTerm.var, ys))))
        D = substitute(res.W, dict(zip(y1, map(LinTerm.var, y2))))
        return qe(exists(y2, conj(graph, D)))


def _kind(at: Atom, c) -> str:
    """How the atom c*(x - l) op 0 relates x to l."""
    if at.op == EQ:
        return "="
    if c > 0:
        return "<" if at.op == LT else "<="
    return ">" if at.op == LT else ">="


def _cmp(lhs: LinTerm, kind: str, rhs: LinTerm) -> Formula:
    if kind == "<":
        return lt(lhs, rhs)
    if kind == "<=":
        return le(lhs, rhs)
    if kind == ">":
        return lt(rhs, lhs)
    if kind == ">=":
        return le(rhs, lhs)
    return eq(lhs, rhs)


def define_type(delta: Formula, xs, ys, a, check: bool = True) -> TypeDefResult:
    """phi and Omega with  delta(a, b) in M*  iff  phi(Omega, b) in M."""
    return Engine(check).define(delta, xs, ys, a)


# ---------------------------------------------------------------------------
# Verification


@dataclass
class Verdict:
    ok: bool
    witness: tuple | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def probe_points(delta: Formula, xs, ys, a, results=(), n_random: int = 200, seed: int = 0) -> list[tuple]:
    """Boundary values of every y-atom at a and at the Omegas, midpoints, +-1, and random tuples."""
    ys = tuple(ys)
    if not ys:
        return [()]
    env = {x: LinTerm.constant(v) for x, v in zip(xs, a)}
    forms = [substitute(_qf(delta), env)] + [r.instantiate() for r in results]
    per: list = []
    for y in ys:
        vals = {Fraction(0)}
        for g in forms:
            for at in atoms(g):
                if at.term.coeff(y) and len(at.term.vars) == 1:
                    b = -at.term.const / at.term.coeff(y)
                    s = std(b)
                    if s not in (float("inf"), float("-inf")):
                        vals.add(Fraction(s))
        vals = sorted(vals)
        extra = {v + d for v in vals for d in (-1, 1)}
        extra |= {(p + q) / 2 for p, q in zip(vals, vals[1:])}
        per.append(sorted(set(vals) | extra))
    rng = random.Random(seed)
    pts = []
    if len(ys) == 1:
        pts = [(v,) for v in per[0]]
    else:
        grid = per[0][:24]
        for v in grid:
            for w in per[1][:24]:
                pts.append((v, w) + tuple(Fraction(0) for _ in ys[2:]))
    for _ in range(n_random):
        pts.append(tuple(Fraction(rng.randint(-40, 40), rng.randint(1, 8)) for _ in ys))
    # points on the hyperplanes of two-variable atoms
    if len(ys) >= 2:
        for g in forms:
            for at in atoms(g):
                vs = [v for v in ys if at.term.coeff(v)]
                if len(vs) < 2:
                    continue
                k = at.term.coeff(vs[-1])
                for t in per[0][:12]:
                    env2 = {v: Fraction(0) for v in ys}
                    env2[vs[0]] = t
                    rest = at.term.const + sum(at.term.coeff(v) * env2[v] for v in vs[:-1])
                    val = -rest / k
                    if isinstance(val, StarNum):
                        s = std(val)
                        if s in (float("inf"), float("-inf")):
                            continue
                        val = Fraction(s)
                    env2[vs[-1]] = Fraction(val)
                    pts.append(tuple(env2[v] for v in ys))
    return pts


def verify_equivalence(delta: Formula, xs, ys, a, r1: TypeDefResult, r2: TypeDefResult, n_random: int = 200, seed: int = 0) -> Verdict:
    """Decide  forall y (phi1(Omega1, y) <-> phi2(Omega2, y))  and spot-check both against delta at a."""
    xs, ys = tuple(xs), tuple(ys)
    p1, p2 = r1.instantiate(), r2.instantiate()
    diff = disj(conj(p1, neg(p2)), conj(p2, neg(p1)))
    w = satisfiable(diff)
    if w is not None:
        return Verdict(False, tuple(w.get(y, Fraction(0)) for y in ys), "not equivalent")
    f = substitute(_qf(delta), {x: LinTerm.constant(v) for x, v in zip(xs, a)})
    for b in probe_points(delta, xs, ys, a, (r1, r2), n_random, seed):
        env = dict(zip(ys, b))
        truth = evaluate(f, {v: lift(env[v]) for v in f.free_vars}) if f.free_vars else evaluate(f, {})
        if r1.holds(b) != truth or r2.holds(b) != truth:
            return Verdict(False, b, "probe disagrees with delta")
    return Verdict(True)


# ---------------------------------------------------------------------------
# Random instances


def random_instance(rng: random.Random, m_max: int = 3, n_max: int = 2, atoms_max: int = 6):
    """(delta, xs, ys, a) with small coefficients and star values of mixed kinds."""
    from .corpus import random_qf, random_star

    m = rng.randint(1, m_max)
    n = rng.randint(0, n_max)
    xs = tuple(f"x{i + 1}" for i in range(m))
    ys = tuple(f"y{i + 1}" for i in range(n))
    k = rng.randint(1, atoms_max)
    delta = random_qf(rng, xs + ys, k, coef=3)
    a = tuple(random_star(rng) for _ in xs)
    return delta, xs, ys, a


__all__ = [
    "TypeDefResult", "define_type", "oracle_define_type", "verify_equivalence", "Verdict",
    "probe_points", "random_instance", "Engine", "ArityError", "CertificateError",
]
