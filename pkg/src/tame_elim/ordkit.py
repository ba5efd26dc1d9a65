"""Definable linear orders: axiom checks, interval dimension, quotients, and the
injective coordinatization of quotient fibers.

An order lives on points of M^m named by ``coords``; its relation is a formula
in ``coords`` and a second copy ``coords2`` meaning ``coords <= coords2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .cells import EMPTY, PiecewiseMap, definable_choice, dim, fiber_dim_partition
from .formula import (
    FALSE, TRUE, Formula, LinTerm, as_term, conj, disj, eq, exists, lt, neg, substitute,
)
from .qe import is_satisfiable, qe, satisfiable, simplify


# ---------------------------------------------------------------------------
# Orders


def names(prefix: str, m: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(1, m + 1))


def tuple_eq(a, b) -> Formula:
    return conj([eq(as_term(x), as_term(y)) for x, y in zip(a, b)])


def lex_le(a, b) -> Formula:
    """Lexicographic a <= b on tuples of variables or terms."""
    a = [as_term(x) for x in a]
    b = [as_term(x) for x in b]
    parts = []
    for k in range(len(a)):
        parts.append(conj([eq(a[i], b[i]) for i in range(k)] + [lt(a[k], b[k])]))
    parts.append(conj([eq(x, y) for x, y in zip(a, b)]))
    return disj(parts)


def lex_lt(a, b) -> Formula:
    return conj(lex_le(a, b), neg(tuple_eq(a, b)))


@dataclass(frozen=True)
class DefLinOrder:
    coords: tuple
    coords2: tuple
    carrier: Formula
    order: Formula
    name: str = ""

    @property
    def arity(self) -> int:
        return len(self.coords)

    def member(self, a) -> Formula:
        return substitute(self.carrier, dict(zip(self.coords, map(as_term, a))))

    def le(self, a, b) -> Formula:
        sigma = dict(zip(self.coords, map(as_term, a)))
        sigma.update(zip(self.coords2, map(as_term, b)))
        return substitute(self.order, sigma)

    def lt(self, a, b) -> Formula:
        return conj(self.le(a, b), neg(tuple_eq(a, b)))

    def restrict(self, f: Formula, name: str = "") -> "DefLinOrder":
        """Suborder on {coords : carrier and f}."""
        return DefLinOrder(self.coords, self.coords2, conj(self.carrier, f), self.order, name or self.name)

    def fresh(self, prefix: str) -> tuple[str, ...]:
        return names(prefix, self.arity)

    @property
    def dim(self):
        return dim(self.carrier, self.coords)


@dataclass
class OrderCheck:
    ok: bool
    failed: str | None = None
    witness: dict | None = None

    def __bool__(self):
        return self.ok


def order_axioms(P: DefLinOrder) -> dict[str, Formula]:
    """The negations of the four linear order axioms (each must be unsatisfiable)."""
    a, b, c = P.fresh("a_"), P.fresh("b_"), P.fresh("c_")
    Pa, Pb, Pc = P.member(a), P.member(b), P.member(c)
    return {
        "reflexive": conj(Pa, neg(P.le(a, a))),
        "antisymmetric": conj(Pa, Pb, P.le(a, b), P.le(b, a), neg(tuple_eq(a, b))),
        "transitive": conj(Pa, Pb, Pc, P.le(a, b), P.le(b, c), neg(P.le(a, c))),
        "total": conj(Pa, Pb, neg(P.le(a, b)), neg(P.le(b, a))),
    }


def check_linear_order(P: DefLinOrder) -> OrderCheck:
    for axiom, bad in order_axioms(P).items():
        w = satisfiable(bad)
        if w is not None:
            return OrderCheck(False, axiom, w)
    return OrderCheck(True)


# ---------------------------------------------------------------------------
# Interval dimension and the relations ~_d


def interval_formula(P: DefLinOrder, a, b, c) -> Formula:
    """c lies strictly between a and b (in either order)."""
    return conj(P.member(c), disj(conj(P.lt(a, c), P.lt(c, b)), conj(P.lt(b, c), P.lt(c, a))))


_PARTITION_CACHE: dict = {}


def interval_dim_partition(P: DefLinOrder) -> list:
    """Guards in (coords, coords2) on which dim of the open interval is constant."""
    key = (P.carrier, P.order, P.coords, P.coords2)
    hit = _PARTITION_CACHE.get(key)
    if hit is None:
        c = P.fresh("c_")
        f = conj(P.member(P.coords), P.member(P.coords2), interval_formula(P, P.coords, P.coords2, c))
        hit = fiber_dim_partition(f, c)
        _PARTITION_CACHE[key] = hit
    return hit


def interval_dim_relation(P: DefLinOrder, d: int) -> Formula:
    """coords ~_d coords2: both in P and the interval between them has dim < d."""
    small = [g for g, k in interval_dim_partition(P) if k is EMPTY or k < d]
    return simplify(conj(P.member(P.coords), P.member(P.coords2), disj(small)))


def class_representatives(P: DefLinOrder, rel: Formula) -> PiecewiseMap:
    """A representative of the class of coords under rel, as a map in coords."""
    return definable_choice(rel, P.coords2)


def map_graph(m: PiecewiseMap, out: Sequence[str], args=None) -> Formula:
    """Graph of a piecewise map with its parameters optionally renamed to args."""
    g = m.graph(out)
    if args is not None:
        g = substitute(g, dict(zip(m.params, map(as_term, args))))
    return g


def compose(outer: PiecewiseMap, inner: PiecewiseMap, params: Sequence[str]) -> PiecewiseMap:
    """outer o inner where outer's parameters are read as inner's values."""
    pieces = []
    for g1, t1 in inner.all_pieces():
        sigma = dict(zip(outer.params, t1))
        for g2, t2 in outer.all_pieces():
            g = conj(g1, substitute(g2, sigma))
            if g is FALSE or not is_satisfiable(g):
                continue
            pieces.append((simplify(g), tuple(t.substitute(sigma) for t in t2)))
    return PiecewiseMap(tuple(params), pieces)


def identity_map(coords: Sequence[str]) -> PiecewiseMap:
    return PiecewiseMap(tuple(coords), [(TRUE, tuple(LinTerm.var(c) for c in coords))])


def _fixed_points(P: DefLinOrder, rep: PiecewiseMap) -> Formula:
    return simplify(conj(P.carrier, substitute(rep.graph(P.coords2), dict(zip(P.coords2, map(LinTerm.var, P.coords))))))


def is_identity_relation(P: DefLinOrder, rel: Formula) -> bool:
    return not is_satisfiable(conj(rel, neg(tuple_eq(P.coords, P.coords2))))


@dataclass
class Collapse:
    source: DefLinOrder
    target: DefLinOrder
    rep: PiecewiseMap
    identity: bool


def collapse_finite_intervals(P: DefLinOrder) -> Collapse:
    """Quotient by 'same maximal finite interval'; all intervals of the result are infinite."""
    rel = interval_dim_relation(P, 1)
    if is_identity_relation(P, rel):
        return Collapse(P, P, identity_map(P.coords), True)
    rep = class_representatives(P, rel)
    R = DefLinOrder(P.coords, P.coords2, _fixed_points(P, rep), P.order, P.name + "/fin")
    return Collapse(P, R, rep, False)


@dataclass
class MonotoneQuotient:
    source: DefLinOrder
    target: DefLinOrder
    rho: PiecewiseMap
    threshold: int
    dim_source: object
    dim_target: object
    fiber_partition: list
    certificates: dict = field(default_factory=dict)
    collapse: Collapse | None = None

    def rho_graph(self, a, r) -> Formula:
        """rho(a) = r as a formula."""
        g = self.rho.graph(self.source.coords2)
        sigma = dict(zip(self.rho.params, map(as_term, a)))
        sigma.update(zip(self.source.coords2, map(as_term, r)))
        return substitute(g, sigma)

    def rho_at(self, point) -> tuple:
        return self.rho.at(dict(zip(self.source.coords, point)))

    @property
    def ok(self) -> bool:
        return all(self.certificates.values())


class ReduceError(ValueError):
    pass


def quotient_certificates(P: DefLinOrder, Q: DefLinOrder, rho_graph, l) -> tuple[dict, list, object]:
    a, b = P.fresh("a_"), P.fresh("b_")
    r, s = P.fresh("r_"), P.fresh("s_")
    certs = {}
    certs["monotone"] = not is_satisfiable(
        conj(P.member(a), P.member(b), P.le(a, b), rho_graph(a, r), rho_graph(b, s), neg(Q.le(r, s)))
    )
    into = not is_satisfiable(conj(P.member(a), neg(qe(exists(r, conj(rho_graph(a, r), Q.member(r)))))))
    onto = not is_satisfiable(conj(Q.member(r), neg(rho_graph(r, r))))
    certs["surjective"] = into and onto
    part = fiber_dim_partition(conj(P.member(a), rho_graph(a, r)), a)
    certs["fiber_dim_le_1"] = all(d is EMPTY or d <= 1 for _, d in part)
    dq = Q.dim
    certs["dim_drop"] = isinstance(dq, int) and isinstance(l, int) and dq == l - 1
    return certs, part, dq


def quotient_reduce(P: DefLinOrder, threshold: int = 2, check: bool = True) -> MonotoneQuotient:
    """Monotone surjection of P onto a definable order of one dimension less.

    Finite intervals are collapsed first; then points whose interval has
    dimension below ``threshold`` are identified, and Q is the set of chosen
    class representatives with the induced order.
    """
    l = P.dim
    if l is EMPTY or l < 2:
        raise ReduceError(f"quotient_reduce needs dim >= 2, got {l}")
    col = collapse_finite_intervals(P)
    R = col.target
    rel = interval_dim_relation(R, threshold)
    if is_identity_relation(R, rel):
        rep = identity_map(R.coords)
    else:
        rep = class_representatives(R, rel)
    Q = DefLinOrder(P.coords, P.coords2, _fixed_points(R, rep), P.order, P.name + "/q")
    rho = rep if col.identity else compose(rep, col.rep, P.coords)
    quo = MonotoneQuotient(P, Q, rho, threshold, l, None, [], collapse=col)
    if check:
        certs, part, dq = quotient_certificates(P, Q, quo.rho_graph, l)
        quo.certificates, quo.fiber_partition, quo.dim_target = certs, part, dq
    return quo


def reduce_chain(P: DefLinOrder) -> list[MonotoneQuotient]:
    """Iterate quotient_reduce down to dimension 1."""
    out = []
    cur = P
    while True:
        d = cur.dim
        if d is EMPTY or d < 2:
            return out
        q = quotient_reduce(cur)
        out.append(q)
        cur = q.target


# ---------------------------------------------------------------------------
# Lemma checks on a single order


def l_dimensional_interval(P: DefLinOrder) -> dict | None:
    """Points a <_P b whose open interval has dim(P) dimensions."""
    l = P.dim
    guards = [g for g, k in interval_dim_partition(P) if k == l]
    f = conj(P.member(P.coords), P.member(P.coords2), P.lt(P.coords, P.coords2), disj(guards))
    return satisfiable(f)


def closure(f: Formula, coords: Sequence[str]) -> Formula:
    """Topological closure of {coords : f} (fiberwise in any other variables)."""
    from . import fm

    coords = tuple(coords)
    f = f if not _has_quantifiers(f) else qe(f)
    parts = []
    for conjunct in fm.dnf(f, open_cells=True):
        g = fm.project(conjunct, coords)
        if g is None:
            continue
        relaxed = [a if a.op != "<" else _weak(a) for a in conjunct]
        parts.append(conj(conj(g), conj(relaxed)))
    return disj(parts)


def _weak(a):
    from .formula import LE, make_atom

    return make_atom(a.term, LE)


def _has_quantifiers(f):
    from .formula import is_quantifier_free

    return not is_quantifier_free(f)


def closed_rays_locus(P: DefLinOrder) -> Formula:
    """Points a of P whose rays (-inf, a] and [a, +inf) are both closed in P."""
    a, c = P.coords, P.fresh("c_")
    down = conj(P.member(c), P.le(c, a))
    up = conj(P.member(c), P.le(a, c))
    bad_down = qe(exists(c, conj(P.member(c), closure(down, c), neg(down))))
    bad_up = qe(exists(c, conj(P.member(c), closure(up, c), neg(up))))
    return simplify(conj(P.member(a), neg(bad_down), neg(bad_up)))


def class_convexity(P: DefLinOrder, rel: Formula) -> bool:
    a, b, c = P.coords, P.coords2, P.fresh("c_")
    rel_ac = substitute(rel, dict(zip(b, map(LinTerm.var, c))))
    return not is_satisfiable(conj(rel, P.member(c), P.le(a, c), P.le(c, b), neg(rel_ac)))


def class_dim_partition(P: DefLinOrder, rel: Formula) -> list:
    """Guards in coords on which dim of the class {coords2 : rel} is constant."""
    return fiber_dim_partition(rel, P.coords2)


def finite_class_locus(P: DefLinOrder, rel: Formula) -> Formula:
    part = class_dim_partition(P, rel)
    return simplify(conj(P.member(P.coords), disj([g for g, k in part if k is EMPTY or k <= 0])))


# ---------------------------------------------------------------------------
# Injective coordinatization of quotient fibers


@dataclass
class IotaCoord:
    m: int
    N: int
    qvars: tuple
    coords: tuple
    fiber: Formula            # a in the fiber over q
    classes: list             # classes[i-1]: a in P_q^i (formula in qvars + coords)
    index_guards: dict        # (i, j) -> formula in qvars + coords
    leftover: Formula = FALSE

    def index_of(self, env: dict) -> tuple[int, int] | None:
        from .formula import evaluate

        for (i, j), g in self.index_guards.items():
            if evaluate(g, {v: env[v] for v in g.free_vars}):
                return i, j
        return None

    def iota(self, q, point) -> tuple:
        env = dict(zip(self.qvars, q))
        env.update(zip(self.coords, point))
        i, j = self.index_of(env)
        s = point[i - 1] if i <= self.m else 0
        return (tuple(q), s, i, j)


def _finite_locus(fam: Formula, fiber_vars, params) -> Formula:
    part = fiber_dim_partition(fam, fiber_vars)
    return disj([g for g, k in part if k is EMPTY or k <= 0])


def _rename(f: Formula, src, dst) -> Formula:
    return substitute(f, dict(zip(src, map(LinTerm.var, dst))))


def _count_at_least(members, k: int, coords, extra) -> Formula:
    """Exists k lexicographically increasing points b^1 < ... < b^k with members(b) and extra(b^k)."""
    pts = [names(f"k{t}_", len(coords)) for t in range(k)]
    parts = [members(p) for p in pts]
    parts += [lex_lt(p, q) for p, q in zip(pts, pts[1:])]
    if extra is not None:
        parts.append(extra(pts[-1]))
    return qe(exists([v for p in pts for v in p], conj(parts)))


def iota_from_fiber(fiber: Formula, qvars: Sequence[str], coords: Sequence[str], max_n: int = 6) -> IotaCoord:
    """Coordinatize a family of fibers of dimension <= 1 (fiber: formula in qvars + coords)."""
    qvars, coords = tuple(qvars), tuple(coords)
    m = len(coords)
    b = names("bb_", m)
    fiber_b = _rename(fiber, coords, b)
    classes = []
    taken = FALSE
    for i in range(m):
        same = conj(fiber_b, eq(LinTerm.var(b[i]), LinTerm.var(coords[i])))
        fin = _finite_locus(same, b, qvars + coords)
        cls = simplify(conj(fiber, neg(taken), fin))
        classes.append(cls)
        taken = disj(taken, cls)
    leftover = simplify(conj(fiber, neg(taken)))
    if leftover is not FALSE and not is_satisfiable(leftover):
        leftover = FALSE
    groups = [(i + 1, classes[i]) for i in range(m)]
    if leftover is not FALSE:
        groups.append((m + 1, leftover))

    def members_factory(i, cls):
        def members(p):
            g = _rename(cls, coords, p)
            if i <= m:
                g = conj(g, eq(LinTerm.var(p[i - 1]), LinTerm.var(coords[i - 1])))
            return g

        return members

    # N: the largest number of points sharing q, i and the i-th coordinate
    N = 1
    for i, cls in groups:
        members = members_factory(i, cls)
        k = 2
        while k <= max_n:
            cnt = _count_at_least(members, k, coords, None)
            if cnt is FALSE or not is_satisfiable(conj(cnt, cls)):
                break
            k += 1
        N = max(N, k - 1)
        if k > max_n:
            raise ValueError("fibers of the coordinatization are not uniformly finite")
    index_guards = {}
    for i, cls in groups:
        members = members_factory(i, cls)
        below = [TRUE]
        for k in range(1, N):
            below.append(_count_at_least(members, k, coords, lambda p: lex_lt(p, coords)))
        below.append(FALSE)
        for j in range(1, N + 1):
            g = simplify(conj(cls, below[j - 1], neg(below[j])))
            if g is not FALSE and is_satisfiable(g):
                index_guards[(i, j)] = g
    return IotaCoord(m, N, qvars, coords, fiber, classes, index_guards, leftover)


def iota_coordinatize(quo: MonotoneQuotient) -> IotaCoord:
    P = quo.source
    q = P.fresh("q_")
    fiber = simplify(conj(P.member(P.coords), quo.rho_graph(P.coords, q)))
    return iota_from_fiber(fiber, q, P.coords)


def iota_injective(io: IotaCoord) -> bool:
    coords = io.coords
    p2 = names("pp_", io.m)
    parts = []
    for (i, j), g in io.index_guards.items():
        g2 = _rename(g, coords, p2)
        same = eq(LinTerm.var(coords[i - 1]), LinTerm.var(p2[i - 1])) if i <= io.m else TRUE
        parts.append(conj(g, g2, same))
    return not is_satisfiable(conj(disj(parts), neg(tuple_eq(coords, p2))))


__all__ = [
    "DefLinOrder", "OrderCheck", "check_linear_order", "order_axioms", "interval_formula",
    "interval_dim_partition", "interval_dim_relation", "collapse_finite_intervals",
    "quotient_reduce", "reduce_chain", "MonotoneQuotient", "ReduceError", "IotaCoord",
    "iota_coordinatize", "iota_from_fiber", "iota_injective", "l_dimensional_interval",
    "closure", "closed_rays_locus", "class_convexity", "class_dim_partition",
    "finite_class_locus", "lex_le", "lex_lt", "tuple_eq", "names", "compose", "Collapse",
]
