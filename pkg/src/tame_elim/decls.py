"""Top-level input declarations: orders, elimination problems, cut problems, and coordinate sets.

::

    (deflinorder :carrier f :order f :arity m [:name n] [:left (u1 ...)] [:right (v1 ...)])
    (eliminate :delta f :x (x1 ...) :y (y1 ...) :a (star ...))
    (cutdef :order <deflinorder or corpus name> :v f)
    (set (x1 ...) f)

The carrier is written in the left variables (default u1..um); the order
relation "left <= right" in the left and right variables (default v1..vm).
"""
from __future__ import annotations

from dataclasses import dataclass

from .corpus import by_name
from .cutdef import CutSpec
from .formula import Formula
from .ordkit import DefLinOrder, names
from .syntax import (
    ParseError, SList, Sym, _head, _pos, parse_formula, parse_keywords, parse_names, parse_rational,
    parse_star, read_one,
)


@dataclass
class EliminateDecl:
    delta: Formula
    xs: tuple
    ys: tuple
    a: tuple


@dataclass
class SetDecl:
    coords: tuple
    formula: Formula


def parse_order(x) -> DefLinOrder:
    if isinstance(x, Sym):
        try:
            return by_name(x.name)
        except KeyError:
            raise ParseError(f"unknown corpus order {x.name!r}", *_pos(x)) from None
    if _head(x) != "deflinorder":
        raise ParseError("expected (deflinorder ...)", *_pos(x))
    kw = parse_keywords(x, {"carrier", "order", "arity", "name", "left", "right"})
    for k in ("carrier", "order", "arity"):
        if k not in kw:
            raise ParseError(f"deflinorder needs :{k}", *_pos(x))
    m = parse_rational(kw["arity"])
    if m.denominator != 1 or m < 1:
        raise ParseError(":arity must be a positive integer", *_pos(kw["arity"]))
    m = int(m)
    left = parse_names(kw["left"]) if "left" in kw else names("u", m)
    right = parse_names(kw["right"]) if "right" in kw else names("v", m)
    if len(left) != m or len(right) != m:
        raise ParseError(f"variable lists must have {m} names", *_pos(x))
    carrier = parse_formula(kw["carrier"])
    order = parse_formula(kw["order"])
    if carrier.free_vars - set(left):
        raise ParseError(f"carrier mentions {sorted(carrier.free_vars - set(left))}", *_pos(kw["carrier"]))
    if order.free_vars - set(left) - set(right):
        raise ParseError(f"order mentions {sorted(order.free_vars - set(left) - set(right))}", *_pos(kw["order"]))
    name = kw["name"].name if isinstance(kw.get("name"), Sym) else ""
    return DefLinOrder(left, right, carrier, order, name)


def parse_eliminate(x) -> EliminateDecl:
    kw = parse_keywords(x, {"delta", "x", "y", "a"})
    for k in ("delta", "x", "y", "a"):
        if k not in kw:
            raise ParseError(f"eliminate needs :{k}", *_pos(x))
    if not isinstance(kw["a"], SList):
        raise ParseError(":a takes a list of star literals", *_pos(kw["a"]))
    a = tuple(parse_star(v) for v in kw["a"])
    return EliminateDecl(parse_formula(kw["delta"]), parse_names(kw["x"]), parse_names(kw["y"]), a)


def parse_cut(x) -> CutSpec:
    kw = parse_keywords(x, {"order", "v"})
    if "order" not in kw or "v" not in kw:
        raise ParseError("cutdef needs :order and :v", *_pos(x))
    P = parse_order(kw["order"])
    V = parse_formula(kw["v"])
    if V.free_vars - set(P.coords):
        raise ParseError(f"V mentions {sorted(V.free_vars - set(P.coords))}", *_pos(kw["v"]))
    return CutSpec(P, V, P.name)


def parse_set(x) -> SetDecl:
    if len(x) != 3:
        raise ParseError("(set (coords) formula)", *_pos(x))
    return SetDecl(parse_names(x[1]), parse_formula(x[2]))


def load(text: str):
    """The declaration or formula in text."""
    x = read_one(text)
    head = _head(x)
    if head == "deflinorder":
        return parse_order(x)
    if head == "eliminate":
        return parse_eliminate(x)
    if head == "cutdef":
        return parse_cut(x)
    if head == "set":
        return parse_set(x)
    return parse_formula(x)


__all__ = ["EliminateDecl", "SetDecl", "parse_order", "parse_eliminate", "parse_cut", "parse_set", "load"]
