"""S-expression reader and printer for formulas and input declarations.

Grammar (UTF-8, ``;`` comments to end of line)::

    formula := (< t t) | (<= t t) | (= t t) | (> t t) | (>= t t)
             | (and f ...) | (or f ...) | (not f) | true | false
             | (exists (v ...) f) | (forall (v ...) f)
    term    := var | rational | eps | omega | (star (e q) ...)
             | (+ t ...) | (- t) | (- t t ...) | (* q t)
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .formula import (
    EQ, FALSE, LE, LT, TRUE, And, Atom, Exists, Forall, Formula, LinTerm, Not, Or,
    compare, conj, disj, neg,
)
from .starnum import EPS, OMEGA, StarNum, normalize, sign


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {msg}" if line else msg)
        self.msg = msg
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Sym:
    name: str
    line: int
    col: int


class SList(list):
    line = 0
    col = 0


_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")
_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_.']*$")

RELATIONS = ("<", "<=", "=", ">", ">=")
KEYWORDS = {"and", "or", "not", "exists", "forall", "true", "false", "star", "eps", "omega",
            "+", "-", "*", *RELATIONS}


def read_all(text: str) -> list:
    """Read every top-level s-expression in text."""
    stack: list[SList] = [SList()]
    line, col = 1, 1
    for m in _TOKEN.finditer(text):
        tok = m.group(0)
        if tok == "(":
            lst = SList()
            lst.line, lst.col = line, col
            stack.append(lst)
        elif tok == ")":
            if len(stack) == 1:
                raise ParseError("unbalanced ')'", line, col)
            done = stack.pop()
            stack[-1].append(done)
        elif not tok[0].isspace() and tok[0] != ";":
            stack[-1].append(Sym(tok, line, col))
        nl = tok.count("\n")
        if nl:
            line += nl
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
    if len(stack) > 1:
        open_ = stack[-1]
        raise ParseError("unclosed '('", open_.line, open_.col)
    return list(stack[0])


def read_one(text: str):
    items = read_all(text)
    if len(items) != 1:
        raise ParseError(f"expected one expression, found {len(items)}", 1, 1)
    return items[0]


def _pos(x):
    return (x.line, x.col)


def _head(x) -> str | None:
    if isinstance(x, SList) and x and isinstance(x[0], Sym):
        return x[0].name
    return None


def parse_rational(x) -> Fraction:
    if isinstance(x, Sym) and _RATIONAL.match(x.name):
        return Fraction(x.name)
    raise ParseError("expected a rational literal", *_pos(x))


def parse_term(x) -> LinTerm:
    if isinstance(x, Sym):
        name = x.name
        if _RATIONAL.match(name):
            return LinTerm.constant(Fraction(name))
        if name == "eps":
            return LinTerm.constant(EPS)
        if name == "omega":
            return LinTerm.constant(OMEGA)
        if name in KEYWORDS or not _IDENT.match(name):
            raise ParseError(f"unknown symbol {name!r} in term", *_pos(x))
        return LinTerm.var(name)
    if not isinstance(x, SList) or not x:
        raise ParseError("empty term", *_pos(x))
    head = _head(x)
    args = x[1:]
    if head == "+":
        out = LinTerm()
        for a in args:
            out = out + parse_term(a)
        return out
    if head == "-":
        if not args:
            raise ParseError("'-' needs at least one argument", *_pos(x))
        first = parse_term(args[0])
        if len(args) == 1:
            return -first
        for a in args[1:]:
            first = first - parse_term(a)
        return first
    if head == "*":
        if len(args) != 2:
            raise ParseError("'*' takes a rational and a term", *_pos(x))
        try:
            k = parse_rational(args[0])
            t = parse_term(args[1])
        except ParseError:
            k = parse_rational(args[1])
            t = parse_term(args[0])
        return t.scale(k)
    if head == "star":
        return LinTerm.constant(parse_star(x))
    raise ParseError(f"unknown term operator {head!r}", *_pos(x))


def parse_star(x) -> StarNum | Fraction:
    if isinstance(x, Sym):
        t = parse_term(x)
        if not t.is_ground():
            raise ParseError("expected a star literal", *_pos(x))
        return t.const
    if _head(x) != "star":
        t = parse_term(x)
        if not t.is_ground():
            raise ParseError("expected a star literal", *_pos(x))
        return t.const
    terms = {}
    for pair in x[1:]:
        if not isinstance(pair, SList) or len(pair) != 2:
            raise ParseError("star components are (exponent coefficient) pairs", *_pos(pair))
        e = parse_rational(pair[0])
        if e.denominator != 1:
            raise ParseError("star exponents are integers", *_pos(pair[0]))
        terms[int(e)] = terms.get(int(e), Fraction(0)) + parse_rational(pair[1])
    return normalize(StarNum(terms))


def parse_formula(x) -> Formula:
    if isinstance(x, Sym):
        if x.name == "true":
            return TRUE
        if x.name == "false":
            return FALSE
        raise ParseError(f"unknown symbol {x.name!r} in formula position", *_pos(x))
    if not x:
        raise ParseError("empty formula", *_pos(x))
    head = _head(x)
    args = x[1:]
    if head in RELATIONS:
        if len(args) != 2:
            raise ParseError(f"'{head}' takes 2 arguments, got {len(args)}", *_pos(x))
        return compare(parse_term(args[0]), head, parse_term(args[1]))
    if head == "and":
        return conj([parse_formula(a) for a in args])
    if head == "or":
        return disj([parse_formula(a) for a in args])
    if head == "not":
        if len(args) != 1:
            raise ParseError(f"'not' takes 1 argument, got {len(args)}", *_pos(x))
        return neg(parse_formula(args[0]))
    if head in ("exists", "forall"):
        if len(args) != 2 or not isinstance(args[0], SList):
            raise ParseError(f"'{head}' takes a variable list and a body", *_pos(x))
        names = []
        for v in args[0]:
            if not isinstance(v, Sym) or v.name in KEYWORDS or not _IDENT.match(v.name):
                raise ParseError("bad bound variable", *_pos(v))
            names.append(v.name)
        body = parse_formula(args[1])
        names = tuple(dict.fromkeys(names))
        return (Exists if head == "exists" else Forall)(names, body) if names else body
    raise ParseError(f"unknown formula operator {head!r}", *_pos(x))


def parse(text: str) -> Formula:
    """Parse one formula from text."""
    return parse_formula(read_one(text))


def parse_keywords(x, allowed) -> dict:
    """Read ``(head :key value ...)`` into a dict keyed by name without colon."""
    out = {}
    items = x[1:]
    if len(items) % 2:
        raise ParseError("keyword arguments come in pairs", *_pos(x))
    for k, v in zip(items[::2], items[1::2]):
        if not isinstance(k, Sym) or not k.name.startswith(":"):
            raise ParseError("expected a :keyword", *_pos(k))
        key = k.name[1:]
        if key not in allowed:
            raise ParseError(f"unknown keyword :{key}", *_pos(k))
        out[key] = v
    return out


def parse_names(x) -> tuple[str, ...]:
    if not isinstance(x, SList):
        raise ParseError("expected a variable list", *_pos(x))
    names = []
    for v in x:
        if not isinstance(v, Sym) or v.name in KEYWORDS or not _IDENT.match(v.name):
            raise ParseError("bad variable name", *_pos(v))
        names.append(v.name)
    return tuple(names)


# ---------------------------------------------------------------------------
# Printing


def scalar_sexp(c) -> str:
    if isinstance(c, StarNum):
        if c == EPS:
            return "eps"
        if c == OMEGA:
            return "omega"
        return "(star " + " ".join(f"({e} {q})" for e, q in sorted(c.terms.items(), reverse=True)) + ")"
    return str(c)


def term_sexp(t: LinTerm) -> str:
    parts = [v if c == 1 else f"(* {c} {v})" for v, c in t.coeffs]
    if t.const or not parts:
        parts.append(scalar_sexp(t.const))
    if len(parts) == 1:
        return parts[0]
    return "(+ " + " ".join(parts) + ")"


def atom_sexp(a: Atom) -> str:
    # positive coefficients on the left, the rest moved to the right
    k = a.term.const
    pos = LinTerm([(v, c) for v, c in a.term.coeffs if c > 0])
    negs = LinTerm([(v, -c) for v, c in a.term.coeffs if c < 0])
    if sign(k) > 0 and a.op != EQ:
        lhs, rhs = pos + k, negs
    else:
        lhs, rhs = pos, negs - k
    return f"({a.op} {term_sexp(lhs)} {term_sexp(rhs)})"


def to_sexp(f: Formula) -> str:
    if f is TRUE:
        return "true"
    if f is FALSE:
        return "false"
    if isinstance(f, Atom):
        return atom_sexp(f)
    if isinstance(f, Not):
        return f"(not {to_sexp(f.arg)})"
    if isinstance(f, And):
        return "(and " + " ".join(to_sexp(a) for a in f.args) + ")"
    if isinstance(f, Or):
        return "(or " + " ".join(to_sexp(a) for a in f.args) + ")"
    if isinstance(f, (Exists, Forall)):
        tag = "exists" if isinstance(f, Exists) else "forall"
        return f"({tag} ({' '.join(f.vars)}) {to_sexp(f.body)})"
    raise TypeError(f"cannot print {f!r}")


__all__ = [
    "ParseError", "parse", "parse_formula", "parse_term", "parse_star", "read_all", "read_one",
    "to_sexp", "term_sexp", "scalar_sexp", "parse_keywords", "parse_names", "SList", "Sym",
    "EQ", "LE", "LT",
]
