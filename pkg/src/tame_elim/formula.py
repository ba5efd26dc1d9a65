"""Linear terms, atoms and first-order formulas over divisible ordered abelian groups.

Terms have rational variable coefficients; the constant slot may hold a star
number.  Atoms are normalized to ``t < 0``, ``t <= 0`` or ``t = 0``.  All
objects are immutable and hash by value.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

from .starnum import StarNum, as_fraction, is_standard, normalize, sign

LT, LE, EQ = "<", "<=", "="
OPS = (LT, LE, EQ)


class FormulaError(ValueError):
    pass


class UnboundVariableError(FormulaError):
    pass


class MixedDomainError(FormulaError):
    pass


# ---------------------------------------------------------------------------
# Linear terms


class LinTerm:
    """sum(coeffs[v] * v) + const, with no zero coefficients stored."""

    __slots__ = ("coeffs", "const", "_hash", "_map")

    def __init__(self, coeffs=(), const=Fraction(0)):
        if isinstance(coeffs, dict):
            coeffs = coeffs.items()
        d: dict[str, Fraction] = {}
        for v, c in coeffs:
            if type(c) is not Fraction:
                c = as_fraction(c)
            if c:
                d[v] = d[v] + c if v in d else c
        self.coeffs = tuple(sorted((v, c) for v, c in d.items() if c))
        self.const = const if type(const) is Fraction else normalize(const)
        self._hash = None
        self._map = None

    @classmethod
    def var(cls, name: str, coeff=1) -> "LinTerm":
        return cls(((name, coeff),))

    @classmethod
    def constant(cls, value) -> "LinTerm":
        return cls((), value)

    @property
    def cmap(self) -> dict[str, Fraction]:
        if self._map is None:
            self._map = dict(self.coeffs)
        return self._map

    def coeff(self, v: str) -> Fraction:
        return self.cmap.get(v, Fraction(0))

    @property
    def vars(self) -> frozenset[str]:
        return frozenset(v for v, _ in self.coeffs)

    def is_ground(self) -> bool:
        return not self.coeffs

    def has_star(self) -> bool:
        return not is_standard(self.const)

    def __add__(self, other):
        if not isinstance(other, LinTerm):
            other = LinTerm.constant(other)
        return LinTerm(itertools.chain(self.coeffs, other.coeffs), self.const + other.const)

    __radd__ = __add__

    def __neg__(self):
        return LinTerm(((v, -c) for v, c in self.coeffs), -self.const)

    def __sub__(self, other):
        if not isinstance(other, LinTerm):
            other = LinTerm.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, k) -> "LinTerm":
        k = as_fraction(k)
        if k == 0:
            return LinTerm()
        return LinTerm(((v, c * k) for v, c in self.coeffs), self.const * k)

    def __mul__(self, k):
        return self.scale(k)

    __rmul__ = __mul__

    def without(self, v: str) -> "LinTerm":
        return LinTerm(((w, c) for w, c in self.coeffs if w != v), self.const)

    def substitute(self, sigma: Mapping[str, "LinTerm"]) -> "LinTerm":
        if not any(v in sigma for v, _ in self.coeffs):
            return self
        out = LinTerm((), self.const)
        rest = []
        for v, c in self.coeffs:
            t = sigma.get(v)
            if t is None:
                rest.append((v, c))
            else:
                out = out + t.scale(c)
        return out + LinTerm(rest)

    def evaluate(self, env: Mapping[str, object]):
        total = self.const
        for v, c in self.coeffs:
            try:
                val = env[v]
            except KeyError:
                raise UnboundVariableError(f"unbound variable {v}") from None
            total = total + c * val
        return normalize(total)

    def rename(self, mapping: Mapping[str, str]) -> "LinTerm":
        return LinTerm(((mapping.get(v, v), c) for v, c in self.coeffs), self.const)

    def __eq__(self, other):
        if not isinstance(other, LinTerm):
            return NotImplemented
        return self.coeffs == other.coeffs and self.const == other.const

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.coeffs, self.const))
        return self._hash

    def __repr__(self):
        return f"LinTerm({self})"

    def __str__(self):
        parts = []
        for v, c in self.coeffs:
            parts.append(v if c == 1 else f"-{v}" if c == -1 else f"{c}*{v}")
        if self.const or not parts:
            parts.append(str(self.const))
        return " + ".join(parts).replace("+ -", "- ")


def as_term(x) -> LinTerm:
    if isinstance(x, LinTerm):
        return x
    if isinstance(x, str):
        return LinTerm.var(x)
    return LinTerm.constant(x)


# ---------------------------------------------------------------------------
# Formulas


class Formula:
    def __and__(self, other):
        return conj(self, other)

    def __or__(self, other):
        return disj(self, other)

    def __invert__(self):
        return neg(self)

    @cached_property
    def free_vars(self) -> frozenset[str]:
        return self._free_vars()

    @cached_property
    def _h(self):
        return hash(self._key())

    def __hash__(self):
        return self._h

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other):
            return False
        return self._h == other._h and self._key() == other._key()

    def __repr__(self):
        from .syntax import to_sexp

        return f"<{type(self).__name__} {to_sexp(self)}>"

    def __str__(self):
        from .syntax import to_sexp

        return to_sexp(self)


class _Const(Formula):
    def __init__(self, value: bool):
        self.value = value

    def _key(self):
        return ("const", self.value)

    def _free_vars(self):
        return frozenset()


TRUE = _Const(True)
FALSE = _Const(False)


class Atom(Formula):
    """term op 0; build through make_atom to get the normalized form."""

    def __init__(self, term: LinTerm, op: str):
        self.term = term
        self.op = op

    def _key(self):
        return ("atom", self.op, self.term)

    def _free_vars(self):
        return self.term.vars

    def holds(self, env) -> bool:
        return _compare(self.term.evaluate(env), self.op)


def _compare(value, op: str) -> bool:
    s = sign(value)
    if op == LT:
        return s < 0
    if op == LE:
        return s <= 0
    return s == 0


def make_atom(term: LinTerm, op: str) -> Formula:
    if op not in OPS:
        raise FormulaError(f"bad relation {op}")
    if term.is_ground():
        return TRUE if _compare(term.const, op) else FALSE
    lead = term.coeffs[0][1]
    k = 1 / lead if op == EQ else 1 / abs(lead)
    if k != 1:
        term = term.scale(k)
    return Atom(term, op)


def compare(lhs, op: str, rhs) -> Formula:
    """Atom for ``lhs op rhs`` with op in <, <=, =, >, >=."""
    lhs, rhs = as_term(lhs), as_term(rhs)
    if op == ">":
        return make_atom(rhs - lhs, LT)
    if op == ">=":
        return make_atom(rhs - lhs, LE)
    return make_atom(lhs - rhs, op)


class Not(Formula):
    def __init__(self, arg: Formula):
        self.arg = arg

    def _key(self):
        return ("not", self.arg)

    def _free_vars(self):
        return self.arg.free_vars


class _NAry(Formula):
    tag = ""

    def __init__(self, args: tuple):
        self.args = args

    def _key(self):
        return (self.tag, self.args)

    def _free_vars(self):
        out = frozenset()
        for a in self.args:
            out |= a.free_vars
        return out


class And(_NAry):
    tag = "and"


class Or(_NAry):
    tag = "or"


class _Quant(Formula):
    tag = ""

    def __init__(self, vars: tuple, body: Formula):
        self.vars = vars
        self.body = body

    def _key(self):
        return (self.tag, self.vars, self.body)

    def _free_vars(self):
        return self.body.free_vars - frozenset(self.vars)


class Exists(_Quant):
    tag = "exists"


class Forall(_Quant):
    tag = "forall"


def _flatten(cls, items):
    seen = {}
    for f in items:
        if isinstance(f, cls):
            for g in f.args:
                seen.setdefault(g, None)
        else:
            seen.setdefault(f, None)
    return list(seen)


def conj(*items: Formula) -> Formula:
    if len(items) == 1 and not isinstance(items[0], Formula):
        items = tuple(items[0])
    args = []
    for f in _flatten(And, items):
        if f is FALSE:
            return FALSE
        if f is not TRUE:
            args.append(f)
    if not args:
        return TRUE
    if len(args) == 1:
        return args[0]
    return And(tuple(args))


def disj(*items: Formula) -> Formula:
    if len(items) == 1 and not isinstance(items[0], Formula):
        items = tuple(items[0])
    args = []
    for f in _flatten(Or, items):
        if f is TRUE:
            return TRUE
        if f is not FALSE:
            args.append(f)
    if not args:
        return FALSE
    if len(args) == 1:
        return args[0]
    return Or(tuple(args))


def neg(f: Formula) -> Formula:
    if f is TRUE:
        return FALSE
    if f is FALSE:
        return TRUE
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def implies(a: Formula, b: Formula) -> Formula:
    return disj(neg(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return conj(implies(a, b), implies(b, a))


def exists(vars, body: Formula) -> Formula:
    vars = tuple(v for v in dict.fromkeys(vars) if v in body.free_vars)
    return Exists(vars, body) if vars else body


def forall(vars, body: Formula) -> Formula:
    vars = tuple(v for v in dict.fromkeys(vars) if v in body.free_vars)
    return Forall(vars, body) if vars else body


def lt(a, b):
    return compare(a, "<", b)


def le(a, b):
    return compare(a, "<=", b)


def eq(a, b):
    return compare(a, "=", b)


def ne(a, b):
    return disj(compare(a, "<", b), compare(b, "<", a))


# ---------------------------------------------------------------------------
# Traversals


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, (Atom, _Const)):
        return True
    if isinstance(f, Not):
        return is_quantifier_free(f.arg)
    if isinstance(f, _NAry):
        return all(is_quantifier_free(a) for a in f.args)
    return False


def atoms(f: Formula) -> list[Atom]:
    out: dict[Atom, None] = {}

    def walk(g):
        if isinstance(g, Atom):
            out.setdefault(g, None)
        elif isinstance(g, Not):
            walk(g.arg)
        elif isinstance(g, _NAry):
            for a in g.args:
                walk(a)
        elif isinstance(g, _Quant):
            walk(g.body)

    walk(f)
    return list(out)


def map_atoms(f: Formula, fn) -> Formula:
    """Rebuild a quantifier-free formula replacing each atom a by fn(a)."""
    cache: dict = {}

    def go(g):
        if isinstance(g, Atom):
            r = cache.get(g)
            if r is None:
                r = cache[g] = fn(g)
            return r
        if isinstance(g, _Const):
            return g
        if isinstance(g, Not):
            return neg(go(g.arg))
        if isinstance(g, And):
            return conj([go(a) for a in g.args])
        if isinstance(g, Or):
            return disj([go(a) for a in g.args])
        raise FormulaError("map_atoms needs a quantifier-free formula")

    return go(f)


def star_constants(f: Formula) -> list[StarNum]:
    return [a.term.const for a in atoms(f) if not is_standard(a.term.const)]


def is_standard_formula(f: Formula) -> bool:
    return not star_constants(f)


def nnf(f: Formula, positive: bool = True) -> Formula:
    """Negation normal form: negations only disappear into atoms."""
    if isinstance(f, _Const):
        return f if positive else neg(f)
    if isinstance(f, Atom):
        if positive:
            return f
        t = f.term
        if f.op == LT:
            return make_atom(-t, LE)
        if f.op == LE:
            return make_atom(-t, LT)
        return disj(make_atom(t, LT), make_atom(-t, LT))
    if isinstance(f, Not):
        return nnf(f.arg, not positive)
    if isinstance(f, And):
        parts = [nnf(a, positive) for a in f.args]
        return conj(parts) if positive else disj(parts)
    if isinstance(f, Or):
        parts = [nnf(a, positive) for a in f.args]
        return disj(parts) if positive else conj(parts)
    if isinstance(f, Exists):
        body = nnf(f.body, positive)
        return Exists(f.vars, body) if positive else Forall(f.vars, body)
    if isinstance(f, Forall):
        body = nnf(f.body, positive)
        return Forall(f.vars, body) if positive else Exists(f.vars, body)
    raise FormulaError(f"unknown formula {f!r}")


def fresh_name(base: str, used) -> str:
    root = base.split("_")[0] or "v"
    for i in itertools.count(1):
        cand = f"{root}_{i}"
        if cand not in used:
            return cand


def substitute(f: Formula, sigma: Mapping[str, object]) -> Formula:
    """Capture-avoiding substitution of linear terms for free variables."""
    sigma = {v: as_term(t) for v, t in sigma.items()}
    sigma = {v: t for v, t in sigma.items() if not (t.coeffs == ((v, Fraction(1)),) and t.const == 0)}
    if not sigma:
        return f
    return _subst(f, sigma)


def _subst(f, sigma):
    if isinstance(f, _Const):
        return f
    relevant = {v: t for v, t in sigma.items() if v in f.free_vars}
    if not relevant:
        return f
    if isinstance(f, Atom):
        return make_atom(f.term.substitute(relevant), f.op)
    if isinstance(f, Not):
        return neg(_subst(f.arg, relevant))
    if isinstance(f, And):
        return conj([_subst(a, relevant) for a in f.args])
    if isinstance(f, Or):
        return disj([_subst(a, relevant) for a in f.args])
    if isinstance(f, _Quant):
        incoming = set()
        for t in relevant.values():
            incoming |= t.vars
        used = set(f.body.free_vars) | incoming | set(relevant) | set(f.vars)
        new_vars = []
        ren = {}
        for v in f.vars:
            if v in incoming:
                w = fresh_name(v, used)
                used.add(w)
                ren[v] = LinTerm.var(w)
                new_vars.append(w)
            else:
                new_vars.append(v)
        body = _subst(f.body, ren) if ren else f.body
        body = _subst(body, relevant)
        return type(f)(tuple(new_vars), body)
    raise FormulaError(f"unknown formula {f!r}")


def rename(f: Formula, mapping: Mapping[str, str]) -> Formula:
    return substitute(f, {v: LinTerm.var(w) for v, w in mapping.items()})


def evaluate(f: Formula, point: Mapping[str, object]) -> bool:
    """Truth of f at a point; every scalar in the point must come from one domain."""
    kinds = {isinstance(v, StarNum) for v in point.values()}
    if len(kinds) > 1:
        raise MixedDomainError("assignment mixes rational and star values")
    missing = f.free_vars - set(point)
    if missing:
        raise UnboundVariableError(f"unbound variables: {sorted(missing)}")
    return _eval(f, point)


def _eval(f, env) -> bool:
    if isinstance(f, _Const):
        return f.value
    if isinstance(f, Atom):
        return f.holds(env)
    if isinstance(f, Not):
        return not _eval(f.arg, env)
    if isinstance(f, And):
        return all(_eval(a, env) for a in f.args)
    if isinstance(f, Or):
        return any(_eval(a, env) for a in f.args)
    if isinstance(f, _Quant):
        from .qe import decide

        closed = substitute(f, {v: LinTerm.constant(env[v]) for v in f.free_vars})
        return decide(closed)
    raise FormulaError(f"unknown formula {f!r}")


def size(f: Formula) -> int:
    if isinstance(f, (Atom, _Const)):
        return 1
    if isinstance(f, Not):
        return 1 + size(f.arg)
    if isinstance(f, _NAry):
        return 1 + sum(size(a) for a in f.args)
    return 1 + size(f.body)


class SemilinearSet:
    """A definable subset of M^m: formula plus the ordered coordinate names.

    Free variables outside ``coords`` are parameters of a family.
    """

    __slots__ = ("coords", "formula")

    def __init__(self, coords: Iterable[str], formula: Formula):
        self.coords = tuple(coords)
        self.formula = formula

    @property
    def arity(self) -> int:
        return len(self.coords)

    @property
    def params(self) -> tuple[str, ...]:
        return tuple(sorted(self.formula.free_vars - set(self.coords)))

    def contains(self, point, env=None) -> bool:
        env = dict(env or {})
        env.update(zip(self.coords, point))
        return _eval(self.formula, env)

    def at(self, point) -> Formula:
        return substitute(self.formula, dict(zip(self.coords, map(as_term, point))))

    def __repr__(self):
        return f"SemilinearSet({self.coords}, {self.formula})"
