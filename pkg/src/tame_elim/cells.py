"""Dimension, cylindrical cells, definable choice and the length measure.

Everything here works on quantifier-free formulas (quantified input is run
through ``qe`` first).  Coordinates are variable names; any other free variable
of a formula is a parameter.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Sequence

from . import fm
from .formula import (
    EQ, FALSE, TRUE, Atom, Formula, LinTerm, atoms, conj, disj, eq, exists, is_quantifier_free, le,
    lt, ne, neg, substitute,
)
from .qe import is_satisfiable, qe, simplify


# ---------------------------------------------------------------------------
# Dimension


@total_ordering
class _Empty:
    """Dimension of the empty set; below every integer."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __lt__(self, other):
        if other is self:
            return False
        if isinstance(other, int):
            return True
        return NotImplemented

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("EMPTY")

    def __repr__(self):
        return "EMPTY"

    def __reduce__(self):
        return (_Empty, ())


EMPTY = _Empty()


def _rank(rows: list[list[Fraction]]) -> int:
    rows = [list(r) for r in rows if any(r)]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                k = rows[i][col] / p[col]
                rows[i] = [a - k * b for a, b in zip(rows[i], p)]
        rank += 1
    return rank


def _ground(f: Formula) -> Formula:
    return f if is_quantifier_free(f) else qe(f)


def _open_dim(conjunct: list[Atom], coords: Sequence[str]) -> int:
    rows = [[a.term.coeff(c) for c in coords] for a in conjunct if a.op == EQ]
    return len(coords) - _rank(rows)


def dim(f: Formula, coords: Sequence[str] | None = None):
    """o-minimal dimension of {coords : f}; EMPTY for the empty set."""
    f = _ground(f)
    coords = tuple(sorted(f.free_vars)) if coords is None else tuple(coords)
    extra = f.free_vars - set(coords)
    if extra:
        raise ValueError(f"dim: unexpected free variables {sorted(extra)}")
    best = EMPTY
    for conjunct in fm.dnf(f, open_cells=True):
        d = _open_dim(conjunct, coords)
        if best is EMPTY or d > best:
            best = d
            if d == len(coords):
                break
    return best


def set_dim(S) -> object:
    return dim(S.formula, S.coords)


def fiber_dim_partition(f: Formula, fiber: Sequence[str]) -> list[tuple[Formula, object]]:
    """Guards over the parameters on which dim of the fiber {fiber : f} is constant."""
    f = _ground(f)
    fiber = tuple(fiber)
    regions: dict = {}
    for conjunct in fm.dnf(f, open_cells=True):
        d = _open_dim(conjunct, fiber)
        g = fm.project(conjunct, fiber)
        if g is None:
            continue
        regions.setdefault(d, []).append(conj(g))
    out = []
    higher = FALSE
    for d in sorted(regions, reverse=True):
        r = disj(regions[d])
        g = simplify(conj(r, neg(higher)))
        if g is not FALSE and is_satisfiable(g):
            out.append((g, d))
        higher = disj(higher, r)
    g = simplify(neg(higher))
    if g is not FALSE and is_satisfiable(g):
        out.append((g, EMPTY))
    out.sort(key=lambda p: (-1 if p[1] is EMPTY else p[1], str(p[0])))
    return out


# ---------------------------------------------------------------------------
# Cells


@dataclass(frozen=True)
class Piece:
    """One coordinate of a cell: a graph t = lo (= hi) or a band lo < t < hi."""

    kind: str
    lo: LinTerm | None = None
    hi: LinTerm | None = None

    @staticmethod
    def graph(t: LinTerm) -> "Piece":
        return Piece("graph", t, t)

    @property
    def is_band(self) -> bool:
        return self.kind == "band"

    def constraint(self, var: str) -> Formula:
        v = LinTerm.var(var)
        if self.kind == "graph":
            return eq(v, self.lo)
        parts = []
        if self.lo is not None:
            parts.append(lt(self.lo, v))
        if self.hi is not None:
            parts.append(lt(v, self.hi))
        return conj(parts)

    def sample(self) -> LinTerm:
        """A point of the piece as a term: graph value, midpoint, or bound -/+ 1."""
        if self.kind == "graph":
            return self.lo
        if self.lo is not None and self.hi is not None:
            return (self.lo + self.hi).scale(Fraction(1, 2))
        if self.lo is not None:
            return self.lo + 1
        if self.hi is not None:
            return self.hi - 1
        return LinTerm()

    def __str__(self):
        from .syntax import term_sexp

        if self.kind == "graph":
            return f"= {term_sexp(self.lo)}"
        lo = "-inf" if self.lo is None else term_sexp(self.lo)
        hi = "+inf" if self.hi is None else term_sexp(self.hi)
        return f"({lo}, {hi})"


@dataclass(frozen=True)
class Cell:
    coords: tuple
    guard: Formula
    pieces: tuple

    @property
    def dim(self) -> int:
        return sum(p.is_band for p in self.pieces)

    @property
    def formula(self) -> Formula:
        return conj([self.guard] + [p.constraint(c) for c, p in zip(self.coords, self.pieces)])

    def sample(self) -> dict:
        """Terms (over the guard's variables) for a point of the cell, coordinate by coordinate."""
        env: dict = {}
        for c, p in zip(self.coords, self.pieces):
            env[c] = p.sample().substitute(env)
        return env


def bounds(f: Formula, t: str) -> list[LinTerm]:
    """Boundary terms of t in f, deduplicated, in a canonical order."""
    out: dict = {}
    for a in atoms(f):
        c = a.term.coeff(t)
        if c:
            out.setdefault(a.term.without(t).scale(-1 / c), None)
    return sorted(out, key=lambda b: (len(b.coeffs), str(b)))


def _tidy(f: Formula) -> Formula:
    return simplify(f, limit=64)


def essential(f: Formula, t: str, b: LinTerm) -> Formula:
    """Whether b is a boundary point of {t : f}, i.e. f is not constant near t = b."""
    from .qe import _virtual

    vals = [_virtual(f, t, b, d) for d in (-1, 0, 1)]
    return _tidy(neg(disj(conj(vals), conj([neg(v) for v in vals]))))


def fiber_cells(f: Formula, t: str, tidy: bool = True) -> list[tuple[Formula, Piece]]:
    """Split {t : f} into graphs and bands over guards in the other variables.

    The pieces are pairwise disjoint and their union is exactly the set.  Cut
    points are the boundary points of the fiber only, so the decomposition
    depends on the fiber as a set and not on how f is written.  Guards that
    are unsatisfiable are dropped.
    """
    from .qe import _virtual

    f = _ground(f)
    bs = bounds(f, t)
    ess = [essential(f, t, b) for b in bs]

    def at(term: LinTerm) -> Formula:
        return substitute(f, {t: term})

    def first(i: int) -> Formula:
        # b_i is the first listed term with its value
        return conj([ne(bs[i], bs[k]) for k in range(i)])

    cand: list[tuple[Formula, Piece]] = []
    none = conj([neg(e) for e in ess])
    cand.append((conj(none, _virtual(f, t, None, -1)), Piece("band")))
    for i, b in enumerate(bs):
        cand.append((conj(ess[i], first(i), at(b)), Piece.graph(b)))
    for j, b in enumerate(bs):
        lowest = conj([disj(neg(e), le(b, c)) for c, e in zip(bs, ess)])
        cand.append((conj(ess[j], first(j), lowest, _virtual(f, t, None, -1)), Piece("band", None, b)))
        highest = conj([disj(neg(e), le(c, b)) for c, e in zip(bs, ess)])
        cand.append((conj(ess[j], first(j), highest, _virtual(f, t, None, 1)), Piece("band", b, None)))
    for i, lo in enumerate(bs):
        for j, hi in enumerate(bs):
            if i == j:
                continue
            gap = conj([disj(neg(e), le(c, lo), le(hi, c)) for c, e in zip(bs, ess)])
            mid = (lo + hi).scale(Fraction(1, 2))
            cand.append((conj(lt(lo, hi), ess[i], ess[j], first(i), first(j), gap, at(mid)), Piece("band", lo, hi)))
    out = []
    for g, p in cand:
        if g is FALSE:
            continue
        if tidy:
            g = _tidy(g)
        if g is FALSE or not is_satisfiable(g):
            continue
        out.append((g, p))
    return out


def cell_decompose(f: Formula, coords: Sequence[str], tidy: bool = True) -> list[Cell]:
    """Cylindrical decomposition of {coords : f}; the other free variables are parameters.

    The last coordinate is decomposed first; each guard is then decomposed in
    the preceding coordinate, and so on.  The innermost guards are formulas over
    the parameters alone (ground truth values when there are none).
    """
    coords = tuple(coords)
    f = _ground(f)

    def go(g: Formula, k: int) -> list[tuple[Formula, tuple]]:
        if k == 0:
            return [(g, ())]
        res = []
        for guard, piece in fiber_cells(g, coords[k - 1], tidy):
            for base, pieces in go(guard, k - 1):
                res.append((base, pieces + (piece,)))
        return res

    return [Cell(coords, g, ps) for g, ps in go(f, len(coords))]


def check_decomposition(f: Formula, cells: Sequence[Cell]) -> tuple[bool, bool]:
    """(pairwise disjoint, union equals the set), both decided exactly."""
    disjoint = all(
        not is_satisfiable(conj(a.formula, b.formula)) for a, b in itertools.combinations(cells, 2)
    )
    union = disj([c.formula for c in cells])
    covers = not is_satisfiable(disj(conj(f, neg(union)), conj(union, neg(f))))
    return disjoint, covers


# ---------------------------------------------------------------------------
# Definable choice


@dataclass
class PiecewiseMap:
    """A definable map given by guard/value pieces with pairwise disjoint guards."""

    params: tuple
    pieces: list  # (guard, value) pairs; value is a LinTerm or a tuple of them
    default_guard: Formula = FALSE
    default: object = None

    def at(self, env: dict):
        from .formula import evaluate

        for g, v in self.pieces:
            if evaluate(g, {p: env[p] for p in g.free_vars}):
                return _eval_value(v, env)
        if self.default is not None and evaluate(
            self.default_guard, {p: env[p] for p in self.default_guard.free_vars}
        ):
            return _eval_value(self.default, env)
        return None

    def graph(self, out: Sequence[str]) -> Formula:
        """Formula in params + out for the graph of the map (default piece included)."""
        parts = []
        for g, v in self.all_pieces():
            vals = v if isinstance(v, tuple) else (v,)
            parts.append(conj([g] + [eq(LinTerm.var(o), t) for o, t in zip(out, vals)]))
        return disj(parts)

    def all_pieces(self):
        out = list(self.pieces)
        if self.default is not None and self.default_guard is not FALSE:
            out.append((self.default_guard, self.default))
        return out


def _eval_value(v, env):
    if isinstance(v, tuple):
        return tuple(t.evaluate(env) for t in v)
    return v.evaluate(env)


def choose_1d(f: Formula, t: str) -> list[tuple[Formula, LinTerm]]:
    """Guard/term pairs picking one element of each nonempty fiber {t : f}.

    The element lies in the lowest cell of the fiber: its minimum when attained,
    otherwise the midpoint of the first band (or bound -/+ 1 for a half-line).
    """
    f = _ground(f)
    out = []
    used = set(f.free_vars)
    from .formula import fresh_name

    s = fresh_name(t, used | {t})
    fs = substitute(f, {t: LinTerm.var(s)})
    for guard, piece in fiber_cells(f, t):
        if piece.kind == "graph":
            below = lt(LinTerm.var(s), piece.lo)
        elif piece.lo is not None:
            below = le(LinTerm.var(s), piece.lo)
        else:
            below = FALSE
        lowest = conj(guard, neg(qe(exists([s], conj(below, fs))))) if below is not FALSE else guard
        lowest = _tidy(lowest)
        if lowest is FALSE or not is_satisfiable(lowest):
            continue
        out.append((lowest, piece.sample()))
    return out


def definable_choice(f: Formula, coords: Sequence[str]) -> PiecewiseMap:
    """Uniform choice of a point in each nonempty fiber {coords : f}."""
    f = _ground(f)
    coords = tuple(coords)
    params = tuple(sorted(f.free_vars - set(coords)))

    def go(g: Formula, k: int) -> list[tuple[Formula, tuple]]:
        if k == len(coords):
            return [(g, ())]
        later = coords[k + 1:]
        proj = qe(exists(later, g)) if later else g
        res = []
        for guard, term in choose_1d(proj, coords[k]):
            sub = substitute(g, {coords[k]: term})
            for g2, rest in go(conj(guard, sub), k + 1):
                res.append((g2, (term,) + tuple(r.substitute({coords[k]: term}) for r in rest)))
        return res

    grouped: dict = {}
    for g, terms in go(f, 0):
        grouped.setdefault(terms, []).append(qe(exists(coords, g)) if set(coords) & g.free_vars else g)
    pieces = []
    for terms, gs in grouped.items():
        g = _tidy(disj(gs))
        if g is not FALSE and is_satisfiable(g):
            pieces.append((g, terms))
    empty = _tidy(neg(qe(exists(coords, f))))
    zero = tuple(LinTerm() for _ in coords)
    return PiecewiseMap(params, pieces, empty, zero)


def choice_graph(f: Formula, coords: Sequence[str], out: Sequence[str]) -> Formula:
    return definable_choice(f, coords).graph(out)


# ---------------------------------------------------------------------------
# Length measure


class UnboundedError(ValueError):
    def __init__(self, msg, guard=None):
        super().__init__(msg)
        self.guard = guard


def mu_function(f: Formula, t: str) -> PiecewiseMap:
    """mu(fiber) = total length of {t : f} as a piecewise linear term in the parameters."""
    f = _ground(f)
    params = tuple(sorted(f.free_vars - {t}))
    bands = []
    for guard, piece in fiber_cells(f, t):
        if not piece.is_band:
            continue
        if piece.lo is None or piece.hi is None:
            raise UnboundedError(f"unbounded fiber on {guard}", guard)
        bands.append((guard, piece.hi - piece.lo))
    found: dict = {}

    def dfs(i: int, acc: Formula, total: LinTerm):
        if i == len(bands):
            found.setdefault(total, []).append(acc)
            return
        g, length = bands[i]
        on = conj(acc, g)
        if is_satisfiable(on):
            dfs(i + 1, on, total + length)
        off = conj(acc, neg(g))
        if is_satisfiable(off):
            dfs(i + 1, off, total)

    dfs(0, TRUE, LinTerm())
    pieces = [(_tidy(disj(gs)), val) for val, gs in found.items()]
    pieces.sort(key=lambda p: str(p[1]))
    return PiecewiseMap(params, pieces)


__all__ = [
    "EMPTY", "dim", "set_dim", "fiber_dim_partition", "Piece", "Cell", "bounds", "essential", "fiber_cells",
    "cell_decompose", "check_decomposition", "PiecewiseMap", "choose_1d", "definable_choice",
    "choice_graph", "mu_function", "UnboundedError",
]
