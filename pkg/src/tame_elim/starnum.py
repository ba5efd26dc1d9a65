"""Elements of the tame extension M* of (Q, <, +).

A star number is a finite formal sum  sum_e q_e * scale^e  with rational
coefficients.  Exponent 0 is the standard scale, e > 0 are infinite scales
(omega^e) and e < 0 infinitesimal scales (eps^-e).  Two numbers are compared at
the largest exponent where they differ, which makes M* a divisible ordered
abelian group containing Q at exponent 0.
"""
from __future__ import annotations

from fractions import Fraction
from functools import total_ordering
from typing import Union

Rational = Fraction
Scalar = Union[Fraction, "StarNum"]


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"not a rational: {value!r}")


@total_ordering
class StarNum:
    """An element of M*; immutable, hashable, exact."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for e, q in items:
                q = as_fraction(q)
                if q:
                    clean[int(e)] = clean.get(int(e), Fraction(0)) + q
        self._terms = tuple(sorted(((e, q) for e, q in clean.items() if q), reverse=True))
        self._hash = None

    @classmethod
    def standard(cls, q) -> "StarNum":
        return cls({0: as_fraction(q)})

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def coeff(self, e: int) -> Fraction:
        for ee, q in self._terms:
            if ee == e:
                return q
        return Fraction(0)

    def is_standard(self) -> bool:
        return all(e == 0 for e, _ in self._terms)

    def sign(self) -> int:
        if not self._terms:
            return 0
        return 1 if self._terms[0][1] > 0 else -1

    def leading(self) -> tuple[int, Fraction] | None:
        return self._terms[0] if self._terms else None

    def __add__(self, other):
        other = lift(other)
        d = dict(self._terms)
        for e, q in other._terms:
            d[e] = d.get(e, Fraction(0)) + q
        return StarNum(d)

    __radd__ = __add__

    def __neg__(self):
        return StarNum({e: -q for e, q in self._terms})

    def __sub__(self, other):
        return self + (-lift(other))

    def __rsub__(self, other):
        return lift(other) + (-self)

    def __mul__(self, k):
        if isinstance(k, StarNum):
            if k.is_standard():
                k = k.coeff(0)
            elif self.is_standard():
                return k * self.coeff(0)
            else:
                raise TypeError("star numbers can only be scaled by rationals")
        k = as_fraction(k)
        return StarNum({e: q * k for e, q in self._terms})

    __rmul__ = __mul__

    def __truediv__(self, k):
        k = as_fraction(k)
        return self * (1 / k)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = lift(other)
        if not isinstance(other, StarNum):
            return NotImplemented
        return self._terms == other._terms

    def __lt__(self, other):
        if isinstance(other, (int, Fraction)):
            other = lift(other)
        if not isinstance(other, StarNum):
            return NotImplemented
        return (self - other).sign() < 0

    def __hash__(self):
        if self._hash is None:
            if self.is_standard():
                self._hash = hash(self.coeff(0))
            else:
                self._hash = hash(self._terms)
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def __repr__(self):
        return f"StarNum({self.terms!r})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, q in self._terms:
            unit = "" if e == 0 else ("w" if e == 1 else "e" if e == -1 else f"w^{e}" if e > 0 else f"e^{-e}")
            if not unit:
                parts.append(str(q))
            elif q == 1:
                parts.append(unit)
            elif q == -1:
                parts.append("-" + unit)
            else:
                parts.append(f"{q}{unit}")
        return " + ".join(parts).replace("+ -", "- ")


EPS = StarNum({-1: 1})
OMEGA = StarNum({1: 1})


def lift(value) -> StarNum:
    if isinstance(value, StarNum):
        return value
    return StarNum.standard(value)


def normalize(value) -> Scalar:
    """Collapse standard star numbers to Fraction; leave proper ones alone."""
    if isinstance(value, StarNum):
        return value.coeff(0) if value.is_standard() else value
    return as_fraction(value)


def is_standard(value) -> bool:
    return not isinstance(value, StarNum) or value.is_standard()


def sign(value) -> int:
    if isinstance(value, StarNum):
        return value.sign()
    return (value > 0) - (value < 0)


# StdValue: a Fraction, or one of the two infinities below.
POS_INF = float("inf")
NEG_INF = float("-inf")


def std(a) -> Fraction | float:
    """Standard part: sup of the rationals <= a, with sup(empty) = -inf, sup(Q) = +inf."""
    if not isinstance(a, StarNum):
        return as_fraction(a)
    lead = a.leading()
    if lead is None:
        return Fraction(0)
    e, q = lead
    if e > 0:
        return POS_INF if q > 0 else NEG_INF
    return a.coeff(0)


def infinitesimal_sign(a) -> int:
    """Sign of a - std(a) for finite a (0 for standard a)."""
    if not isinstance(a, StarNum):
        return 0
    s = std(a)
    if s in (POS_INF, NEG_INF):
        raise ValueError("infinitesimal part undefined for infinite elements")
    return (a - s).sign()


def star_compare(a, b) -> str:
    d = lift(a) - lift(b)
    s = d.sign()
    return "<" if s < 0 else ">" if s > 0 else "="
