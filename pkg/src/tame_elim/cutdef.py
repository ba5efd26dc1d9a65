"""Standard definitions of cuts carved out of definable orders by star sets.

Given a definable linear order P and a formula V with star constants, the
standard points of V in P form W = V ∩ P.  When W is downward closed,
``cut_definable`` produces a standard formula for it by induction on dim(P):
a one-dimensional P is handled curve by curve; otherwise P is mapped onto a
lower-dimensional order Q, the classes of Q wholly inside W are detected by
a measure test on the fibers, and the result is pulled back.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cells import EMPTY, cell_decompose, definable_choice, fiber_cells, fiber_dim_partition, mu_function
from .formula import (
    FALSE, TRUE, Formula, LinTerm, as_term, conj, disj, eq, evaluate, exists, forall,
    fresh_name, implies, is_quantifier_free, le, lt, neg, substitute,
)
from .ordkit import DefLinOrder, IotaCoord, MonotoneQuotient, iota_coordinatize, quotient_reduce
from .qe import is_satisfiable, qe, simplify
from .star import eval_star, slot_convert, standard_endpoints, standard_points_1d, standard_trace
from .starnum import EPS, OMEGA, StarNum, normalize


@dataclass
class CutSpec:
    order: DefLinOrder
    V: Formula  # over order.coords; star constants allowed
    name: str = ""


@dataclass
class CutCheck:
    ok: bool
    witness: tuple | None = None  # (c, p): p in W, c <_P p, c not in W

    def __bool__(self):
        return self.ok


@dataclass
class Frame:
    dim: object
    kind: str                 # "base" or "quotient"
    W: Formula
    B: Formula | None = None
    lam: dict = field(default_factory=dict)
    omega: tuple = ()


@dataclass
class CutResult:
    W: Formula
    lam: dict
    trace: list
    omega: tuple = ()

    @property
    def depth(self) -> int:
        return len(self.trace)


class NotACutError(ValueError):
    def __init__(self, witness):
        super().__init__(f"V ∩ P is not downward closed; witness {witness}")
        self.witness = witness


def _ground(f: Formula) -> Formula:
    return f if is_quantifier_free(f) else qe(f)


def _at(f: Formula, coords, point) -> Formula:
    return substitute(f, {c: as_term(v) for c, v in zip(coords, point)})


# ---------------------------------------------------------------------------
# Cut check


def trace_on(spec: CutSpec) -> Formula:
    """Exact standard formula for V ∩ P (atomwise conversion)."""
    P = spec.order
    return simplify(conj(P.carrier, standard_trace(_ground(spec.V))))


def is_cut(spec: CutSpec) -> CutCheck:
    """Decide whether V ∩ P is downward closed in P, with a violating pair otherwise."""
    P = spec.order
    W = trace_on(spec)
    c = P.fresh("c_")
    Wc = _at(W, P.coords, [LinTerm.var(v) for v in c])
    bad = conj(W, P.member(c), P.lt(c, P.coords), neg(Wc))
    if not is_satisfiable(bad):
        return CutCheck(True)
    choice = definable_choice(bad, tuple(c) + tuple(P.coords))
    pt = choice.at({})
    m = len(P.coords)
    return CutCheck(False, (tuple(pt[:m]), tuple(pt[m:])))


def is_downward_closed(P: DefLinOrder, W: Formula) -> bool:
    c = P.fresh("c_")
    Wc = _at(W, P.coords, [LinTerm.var(v) for v in c])
    return not is_satisfiable(conj(P.member(P.coords), W, P.member(c), P.lt(c, P.coords), neg(Wc)))


# ---------------------------------------------------------------------------
# One-dimensional base case


def one_dim_trace(A: Formula, coords: Sequence[str], V: Formula, slots: set | None = None) -> tuple[Formula, tuple]:
    """Standard formula for the standard points of V in the set A of dimension <= 1.

    A is cut into points and curves; each curve is parameterized by its band
    coordinate s, V is pulled back to a one-variable star set, and its
    standard part is read off from endpoints.  Also returns the std values of
    the endpoints used.

    With ``slots`` (a set of names in use, extended in place) every star
    endpoint becomes a fresh slot variable instead, and the second value is
    the tuple of (slot, std value, tag) triples.
    """
    coords = tuple(coords)
    V = _ground(V)
    parts = []
    stds: list = []
    for cell in cell_decompose(A, coords):
        if cell.guard is FALSE:
            continue
        if cell.dim > 1:
            raise ValueError("one_dim_trace needs a set of dimension <= 1")
        env = cell.sample()
        if cell.dim == 0:
            pt = [env[c].const for c in coords]
            if eval_star(V, dict(zip(coords, pt))):
                parts.append(cell.formula)
            continue
        k = next(i for i, p in enumerate(cell.pieces) if p.is_band)
        band = coords[k]
        s = fresh_name("s", set(coords) | V.free_vars)
        sv = LinTerm.var(s)
        path: dict = {}
        for c, p in zip(coords, cell.pieces):
            path[c] = sv if c == band else p.sample().substitute(path)
        piece = cell.pieces[k]
        lo = piece.lo.substitute(path) if piece.lo is not None else None
        hi = piece.hi.substitute(path) if piece.hi is not None else None
        dom = conj([x for x in (lt(lo, sv) if lo is not None else TRUE, lt(sv, hi) if hi is not None else TRUE)])
        if slots is not None:
            conv = slot_convert(substitute(V, path), (), {}, used=slots, force=True)
            stds.extend(zip(conv.slots, conv.omega, conv.tags))
            tr = conj(dom, conv.formula)
        else:
            pulled = simplify(conj(dom, substitute(V, path)))
            stds.extend(standard_endpoints(pulled, s))
            tr = standard_points_1d(pulled, s)
        parts.append(conj(cell.formula, substitute(tr, {s: LinTerm.var(band)})))
    if slots is not None:
        return simplify(disj(parts)), tuple(stds)
    return simplify(disj(parts)), tuple(sorted(set(stds)))


# ---------------------------------------------------------------------------
# Inductive step


_QUOTIENTS: dict = {}


def _key(P: DefLinOrder):
    return (P.coords, P.coords2, P.carrier, P.order)


def quotient_data(P: DefLinOrder) -> tuple[MonotoneQuotient, IotaCoord]:
    """quotient_reduce and its injective coordinatization, cached per order."""
    k = _key(P)
    hit = _QUOTIENTS.get(k)
    if hit is None:
        quo = quotient_reduce(P, check=False)
        io = iota_coordinatize(quo)
        hit = (quo, io)
        _QUOTIENTS[k] = hit
    return hit


def _segments(piece):
    """Segment inside a band and the measure threshold for it."""
    half = Fraction(1, 2)
    if piece.lo is not None and piece.hi is not None:
        return piece.lo, piece.hi, (piece.hi - piece.lo).scale(half)
    if piece.lo is not None:
        return piece.lo, piece.lo + 1, LinTerm.constant(half)
    if piece.hi is not None:
        return piece.hi - 1, piece.hi, LinTerm.constant(half)
    return LinTerm(), LinTerm.constant(1), LinTerm.constant(half)


def measure_condition(Pfam: Formula, Vfam: Formula, s: str) -> Formula:
    """On every band of {s : Pfam}, V covers more than half of the test segment."""
    conds = []
    for guard, piece in fiber_cells(Pfam, s):
        if not piece.is_band:
            continue
        lo, hi, thr = _segments(piece)
        sv = LinTerm.var(s)
        seg = conj(le(lo, sv), le(sv, hi))
        mu = mu_function(conj(Vfam, seg), s)
        big = disj([conj(g, lt(thr, val)) for g, val in mu.all_pieces()])
        conds.append(implies(guard, big))
    return conj(conds)


def b_formula(P: DefLinOrder, V: Formula, quo: MonotoneQuotient, io: IotaCoord) -> Formula:
    """Star formula in io.qvars whose standard points in Q are the classes filled by W.

    The result may additionally contain the largest class meeting W.
    """
    qv = io.qvars
    p = P.coords
    fiber = io.fiber
    s = fresh_name("s", set(qv) | set(p) | V.free_vars)
    sv = LinTerm.var(s)
    conds = []
    for (i, j), g in sorted(io.index_guards.items()):
        if i > io.m:
            continue
        pin = eq(LinTerm.var(p[i - 1]), sv)
        Pfam = simplify(qe(exists(p, conj(g, pin))))
        Vfam = simplify(qe(exists(p, conj(g, pin, V))))
        conds.append(measure_condition(Pfam, Vfam, s))
    part = fiber_dim_partition(fiber, p)
    fin = simplify(disj([gd for gd, k in part if k is EMPTY or k <= 0]))
    inside = qe(forall(p, implies(fiber, V)))
    return simplify(disj(conj(fin, inside), conj(neg(fin), conj(conds))))


def _extreme(Q: DefLinOrder, S: Formula, lowest: bool):
    """The least (or greatest) point of the standard set S in Q, or None."""
    o = Q.fresh("o_")
    So = _at(S, Q.coords, [LinTerm.var(v) for v in o])
    beyond = Q.lt(o, Q.coords) if lowest else Q.lt(Q.coords, o)
    ext = simplify(conj(Q.member(Q.coords), S, neg(qe(exists(o, conj(Q.member(o), So, beyond))))))
    if ext is FALSE or not is_satisfiable(ext):
        return None
    return tuple(definable_choice(ext, Q.coords).at({}))


def cut_definable(spec: CutSpec, check: bool = True, slots: set | None = None) -> CutResult:
    """Standard formula for W = V ∩ P, assumed (or checked) to be a cut of P.

    With ``slots`` the star endpoints of a one-dimensional order are left as
    slot variables (see one_dim_trace) and omega lists (slot, value, tag).
    """
    if check:
        chk = is_cut(spec)
        if not chk:
            raise NotACutError(chk.witness)
    if slots is not None:
        P = spec.order
        if not (P.dim is EMPTY or P.dim <= 1):
            raise ValueError("slot output is only produced by the one-dimensional base case")
        W, om = one_dim_trace(P.carrier, P.coords, _ground(spec.V), slots)
        return CutResult(W, {"branch": "base"}, [Frame(P.dim, "base", W, omega=om)], om)
    return _cut(spec.order, _ground(spec.V))


def _cut(P: DefLinOrder, V: Formula) -> CutResult:
    l = P.dim
    if l is EMPTY or l <= 1:
        W, stds = one_dim_trace(P.carrier, P.coords, V)
        fr = Frame(l, "base", W, omega=stds)
        return CutResult(W, {"branch": "base"}, [fr], stds)
    quo, io = quotient_data(P)
    Q = quo.target
    B = b_formula(P, V, quo, io)
    BQ = substitute(B, dict(zip(io.qvars, map(LinTerm.var, Q.coords))))
    sub = _cut(Q, BQ)
    WQ = sub.W
    lam = _resolve_lambda(P, V, quo, Q, WQ)
    r = P.fresh("r_")
    rho = quo.rho_graph(P.coords, r)
    if lam["point"] is None:
        below = _at(WQ, Q.coords, [LinTerm.var(v) for v in r])
        W = conj(P.member(P.coords), qe(exists(r, conj(rho, below))))
    else:
        lt_lam = Q.lt(r, lam["point"])
        W = disj(conj(P.member(P.coords), qe(exists(r, conj(rho, lt_lam)))), lam["fiber_cut"])
    W = simplify(W)
    omega = sub.omega + tuple(lam["point"] or ()) + lam.get("omega", ())
    fr = Frame(l, "quotient", W, BQ, lam, omega)
    return CutResult(W, lam, [fr] + sub.trace, omega)


def _resolve_lambda(P, V, quo, Q, WQ) -> dict:
    """Locate the largest class meeting W, if any, and the cut W induces on it."""

    def fiber_cut(point):
        F = conj(P.member(P.coords), quo.rho_graph(P.coords, point))
        return one_dim_trace(F, P.coords, V)

    rest = simplify(conj(Q.member(Q.coords), neg(WQ)))
    lo = _extreme(Q, rest, lowest=True)
    if lo is not None:
        fc, stds = fiber_cut(lo)
        if fc is not FALSE and is_satisfiable(fc):
            return {"branch": "max-outside-B", "point": lo, "fiber_cut": fc, "omega": stds}
    hi = _extreme(Q, WQ, lowest=False)
    if hi is not None:
        fc, stds = fiber_cut(hi)
        return {"branch": "max-in-B", "point": hi, "fiber_cut": fc, "omega": stds}
    return {"branch": "no-max", "point": None, "fiber_cut": FALSE}


# ---------------------------------------------------------------------------
# Verification, the convex-hull shortcut, and the uniform variant


def verify_cut(spec: CutSpec, result: CutResult, probes=()) -> bool:
    """Exact agreement of result.W with V on P, cut-ness, and probe agreement."""
    P = spec.order
    truth = trace_on(spec)
    W = conj(P.member(P.coords), result.W)
    if is_satisfiable(disj(conj(W, neg(truth)), conj(truth, neg(W)))):
        return False
    if not is_downward_closed(P, W):
        return False
    V = _ground(spec.V)
    for pt in probes:
        env = dict(zip(P.coords, pt))
        if not evaluate(P.carrier, env):
            continue
        if evaluate(result.W, env) != eval_star(V, env):
            return False
    return True


def convex_hull_shortcut(spec: CutSpec) -> Formula:
    """Standard points of P inside the convex hull of V in P*.

    Correct when V is itself a cut of P*, wrong in general.
    """
    P = spec.order
    a, b = P.fresh("ha_"), P.fresh("hb_")
    V = _ground(spec.V)
    Va = _at(V, P.coords, [LinTerm.var(v) for v in a])
    Vb = _at(V, P.coords, [LinTerm.var(v) for v in b])
    hull = qe(exists(tuple(a) + tuple(b), conj(P.member(a), P.member(b), Va, Vb, P.le(a, P.coords), P.le(P.coords, b))))
    return simplify(conj(P.carrier, standard_trace(hull)))


@dataclass
class UniformCut:
    E: Formula                 # over slots + coords
    slots: tuple
    instances: list            # (params assignment, omega, tags)


def cut_definable_uniform(P: DefLinOrder, V: Formula, params: Sequence[str], assignments: Sequence[dict]) -> list:
    """Cut definitions for a family V_x, one shared skeleton, one parameter tuple per instance.

    The skeleton (cells of P, or quotient and coordinatization) is computed
    once for the order; each instance contributes its parameter tuple omega.
    Returns (assignment, CutResult) pairs; an empty cut gets omega = ().
    """
    out = []
    V = _ground(V)
    for env in assignments:
        sigma = {x: LinTerm.constant(v) for x, v in env.items()}
        spec = CutSpec(P, substitute(V, sigma))
        res = cut_definable(spec)
        if res.W is FALSE or not is_satisfiable(conj(P.carrier, res.W)):
            res.omega = ()
        out.append((env, res))
    return out


def uniform_base(P: DefLinOrder, V: Formula, params: Sequence[str], assignments: Sequence[dict]) -> list[UniformCut]:
    """One-dimensional P: a standard E(z, p) with E(omega(x), p) = V_x ∩ P, grouped by shape."""
    if not (P.dim is EMPTY or P.dim <= 1):
        raise ValueError("uniform_base needs dim(P) <= 1")
    V = _ground(V)
    groups: dict = {}
    for env in assignments:
        conv = slot_convert(V, params, env)
        key = conv.tags
        if key not in groups:
            E, _ = one_dim_trace(P.carrier, P.coords, TRUE)
            groups[key] = UniformCut(simplify(conj(E, conv.formula)), conv.slots, [])
        groups[key].instances.append((env, conv.omega, conv.tags))
    return list(groups.values())


# ---------------------------------------------------------------------------
# Random instances


def _star_point(rng: random.Random, P: DefLinOrder) -> tuple:
    """A point near P with small star perturbations."""
    m = len(P.coords)
    pt = []
    for _ in range(m):
        q = Fraction(rng.randint(1, 7), 8)
        kind = rng.randrange(4)
        if kind == 0:
            pt.append(q)
        elif kind == 1:
            pt.append(normalize(q + EPS * rng.choice([1, -1])))
        elif kind == 2:
            pt.append(normalize(q + EPS * rng.choice([2, -1]) + StarNum({-2: rng.choice([1, -1])})))
        else:
            pt.append(normalize(StarNum({-1: rng.choice([1, -1])}) + rng.choice([0, 1])))
    return tuple(pt)


def random_cutspec(rng: random.Random, P: DefLinOrder) -> CutSpec:
    """V = {p <_P a} or {p <=_P a} for a star point a, plus parts with no standard points in P."""
    a = _star_point(rng, P)
    base = P.lt(P.coords, a) if rng.random() < 0.5 else P.le(P.coords, a)
    junk = []
    for _ in range(rng.randint(0, 2)):
        i = rng.randrange(len(P.coords))
        r = Fraction(rng.randint(1, 7), 8) + EPS * rng.choice([1, -1, 3])
        off = eq(LinTerm.var(P.coords[i]), normalize(r))
        if rng.random() < 0.5:
            off = disj(off, conj(lt(LinTerm.var(P.coords[i]), -OMEGA * 1 + rng.randint(-3, 3))))
        junk.append(off)
    return CutSpec(P, disj([base] + junk), P.name)


__all__ = [
    "CutSpec", "CutCheck", "CutResult", "Frame", "NotACutError", "is_cut", "is_downward_closed",
    "trace_on", "one_dim_trace", "quotient_data", "b_formula", "measure_condition", "cut_definable",
    "verify_cut", "convex_hull_shortcut", "cut_definable_uniform", "uniform_base", "UniformCut",
    "random_cutspec",
]
