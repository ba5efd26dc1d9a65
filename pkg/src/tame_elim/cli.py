"""Command-line front end."""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass, field

from .cells import EMPTY, cell_decompose, dim
from .cutdef import CutSpec, cut_definable, is_cut, verify_cut
from .decls import EliminateDecl, SetDecl, load
from .engine import ArityError, TypeDefResult, define_type, oracle_define_type, verify_equivalence
from .formula import Formula, FormulaError
from .ordkit import DefLinOrder, ReduceError, check_linear_order, quotient_reduce, reduce_chain
from .qe import FreeVariableError, decide, qe, simplify
from .syntax import ParseError, scalar_sexp, term_sexp, to_sexp

OK, FAILED, BAD_INPUT = 0, 1, 2


class InputError(Exception):
    pass


@dataclass
class RunReport:
    command: str
    digest: str = ""
    output: str = ""
    omega: tuple = ()
    certificates: dict = field(default_factory=dict)
    trace: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    lines: list = field(default_factory=list)
    status: int = OK

    def as_dict(self, with_timings: bool) -> dict:
        d = {
            "command": self.command,
            "input_digest": self.digest,
            "output": self.output,
            "omega": [scalar_sexp(w) for w in self.omega],
            "certificates": self.certificates,
            "trace": self.trace,
            "status": self.status,
        }
        if with_timings:
            d["timings"] = {k: round(v, 6) for k, v in self.timings.items()}
        return d


class _Clock:
    def __init__(self, report: RunReport):
        self.report = report

    def __call__(self, phase: str, fn, *args, **kw):
        t0 = time.perf_counter()
        try:
            return fn(*args, **kw)
        finally:
            self.report.timings[phase] = self.report.timings.get(phase, 0.0) + time.perf_counter() - t0


def _read(path: str, report: RunReport):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None
    report.digest = "sha256:" + hashlib.sha256(text.encode()).hexdigest()
    try:
        return load(text)
    except ParseError as e:
        raise InputError(f"{path}:{e}") from None


def _expect(obj, kind, what: str):
    if not isinstance(obj, kind):
        raise InputError(f"expected {what}")
    return obj


def _formula(obj) -> Formula:
    if isinstance(obj, SetDecl):
        return obj.formula
    return _expect(obj, Formula, "a formula")


def _coords(obj) -> tuple:
    if isinstance(obj, SetDecl):
        return obj.coords
    return tuple(sorted(_formula(obj).free_vars))


def _dim_text(k) -> str:
    return "empty" if k is EMPTY else str(k)


def _tuple_text(items) -> str:
    return "(" + " ".join(scalar_sexp(w) for w in items) + ")"


# ---------------------------------------------------------------------------
# Commands


def cmd_qe(args, rep: RunReport, clock: _Clock):
    f = _formula(_read(args.file, rep))
    g = clock("qe", lambda: simplify(qe(f)))
    rep.output = to_sexp(g)
    rep.lines.append(rep.output)


def cmd_decide(args, rep, clock):
    f = _formula(_read(args.file, rep))
    try:
        v = clock("decide", decide, f)
    except FreeVariableError as e:
        raise InputError(str(e)) from None
    rep.output = "true" if v else "false"
    rep.lines.append(rep.output)


def cmd_dim(args, rep, clock):
    obj = _read(args.file, rep)
    k = clock("dim", dim, _formula(obj), _coords(obj))
    rep.output = _dim_text(k)
    rep.lines.append(rep.output)


def cmd_celldec(args, rep, clock):
    obj = _read(args.file, rep)
    f, coords = _formula(obj), _coords(obj)
    cells = clock("celldec", cell_decompose, f, coords)
    parts = []
    for i, c in enumerate(cells):
        line = f"cell {i} dim {c.dim}: {to_sexp(c.formula)}"
        rep.lines.append(line)
        parts.append(to_sexp(c.formula))
    rep.output = "(or " + " ".join(parts) + ")" if parts else "false"
    rep.trace.append({"cells": len(cells), "coords": list(coords)})


def _check_order(P: DefLinOrder, rep, clock) -> bool:
    chk = clock("ordcheck", check_linear_order, P)
    rep.certificates["linear_order"] = chk.ok
    if not chk.ok:
        pts = _split_witness(P, chk.witness or {})
        rep.lines.append(f"axiom {chk.failed} fails; witness " + " ".join(pts))
        rep.output = f"not a linear order: {chk.failed}"
        rep.status = FAILED
        rep.trace.append({"failed_axiom": chk.failed, "witness": pts})
    return chk.ok


def _split_witness(P: DefLinOrder, w: dict) -> list[str]:
    out = []
    for prefix in ("a_", "b_", "c_"):
        vs = [k for k in sorted(w) if k.startswith(prefix)]
        if vs:
            out.append(_tuple_text([w[k] for k in vs]))
    return out


def cmd_ordcheck(args, rep, clock):
    P = _expect(_read(args.file, rep), DefLinOrder, "a (deflinorder ...) declaration")
    if _check_order(P, rep, clock):
        rep.output = "linear order"
        rep.lines.append(f"linear order of dimension {_dim_text(P.dim)}")


def _quotient_lines(q, rep, step: int):
    Q = q.target
    rep.lines.append(f"step {step}: dim {_dim_text(q.dim_source)} -> {_dim_text(q.dim_target)}")
    rep.lines.append(f"  quotient carrier: {to_sexp(simplify(Q.carrier))}")
    for g, v in q.rho.all_pieces():
        vals = v if isinstance(v, tuple) else (v,)
        rep.lines.append(f"  rho on {to_sexp(g)}: (" + " ".join(term_sexp(t) for t in vals) + ")")
    for k, ok in q.certificates.items():
        rep.lines.append(f"  certificate {k}: {'pass' if ok else 'FAIL'}")
    rep.trace.append({
        "step": step, "dim_source": _dim_text(q.dim_source), "dim_target": _dim_text(q.dim_target),
        "certificates": dict(q.certificates), "rho_pieces": len(q.rho.all_pieces()),
    })


def cmd_reduce_order(args, rep, clock):
    P = _expect(_read(args.file, rep), DefLinOrder, "a (deflinorder ...) declaration")
    if not _check_order(P, rep, clock):
        return
    try:
        chain = clock("reduce", reduce_chain, P) if args.iterate else [clock("reduce", quotient_reduce, P)]
    except ReduceError as e:
        raise InputError(str(e)) from None
    for i, q in enumerate(chain, 1):
        _quotient_lines(q, rep, i)
        for k, ok in q.certificates.items():
            rep.certificates[f"step{i}.{k}"] = ok
    rep.output = to_sexp(simplify(chain[-1].target.carrier))
    if not all(q.ok for q in chain):
        rep.status = FAILED


def cmd_cutdef(args, rep, clock):
    spec = _expect(_read(args.file, rep), CutSpec, "a (cutdef ...) declaration")
    chk = clock("is_cut", is_cut, spec)
    rep.certificates["is_cut"] = chk.ok
    if not chk.ok:
        c, p = chk.witness
        rep.lines.append(f"not a cut: {_tuple_text(p)} is in V but {_tuple_text(c)} below it is not")
        rep.output = "not a cut"
        rep.status = FAILED
        return
    res = clock("cut_definable", cut_definable, spec, True)
    rep.output = to_sexp(res.W)
    rep.omega = tuple(res.omega)
    rep.lines.append(f"W: {rep.output}")
    if res.lam:
        rep.lines.append(f"maximum case: {res.lam.get('branch')}")
    ok = clock("verify", verify_cut, spec, res)
    rep.certificates["verified"] = ok
    rep.lines.append(f"verify: {'pass' if ok else 'FAIL'}")
    rep.trace.append({"depth": res.depth, "case": (res.lam or {}).get("branch")})
    if not ok:
        rep.status = FAILED


def _result_lines(tag: str, r: TypeDefResult, rep):
    rep.lines.append(f"{tag}phi: {to_sexp(r.phi)}")
    rep.lines.append(f"{tag}slots: ({' '.join(r.slots)})")
    rep.lines.append(f"{tag}omega: {_tuple_text(r.omega)}")
    rep.lines.append(f"{tag}phi(omega): {to_sexp(simplify(r.instantiate()))}")


def _elim(args, rep, clock, ms: bool, oracle: bool, verify: bool):
    d = _expect(_read(args.file, rep), EliminateDecl, "an (eliminate ...) declaration")
    try:
        r = clock("define_type", define_type, d.delta, d.xs, d.ys, d.a, True) if ms else None
        o = clock("oracle", oracle_define_type, d.delta, d.xs, d.ys, d.a) if oracle or verify else None
    except ArityError as e:
        raise InputError(str(e)) from None
    main = r or o
    rep.output = to_sexp(main.phi)
    rep.omega = tuple(main.omega)
    if r is not None:
        _result_lines("", r, rep)
        for lv in r.trace:
            rep.trace.append({"m": lv.m, "atom": lv.atom, "form": lv.form,
                              **{k: str(v) for k, v in sorted(lv.detail.items())}})
    if o is not None and (oracle or r is None):
        _result_lines("oracle " if r is not None else "", o, rep)
    if verify:
        v = clock("verify", verify_equivalence, d.delta, d.xs, d.ys, d.a, r or o, o, 200, args.seed)
        rep.certificates["equivalent"] = v.ok
        if v.ok:
            rep.lines.append("verify: pass")
        else:
            rep.lines.append(f"verify: FAIL ({v.reason}) witness {_tuple_text(v.witness or ())}")
            rep.status = FAILED


def cmd_eliminate(args, rep, clock):
    _elim(args, rep, clock, True, args.oracle, args.verify)


def cmd_oracle(args, rep, clock):
    _elim(args, rep, clock, False, True, False)


def cmd_verify(args, rep, clock):
    _elim(args, rep, clock, True, False, True)


def cmd_selftest(args, rep, clock):
    from .selftest import run_selftest

    log = (lambda s: print(s, file=sys.stderr, flush=True)) if args.trace else None
    report = run_selftest(args.seed, args.count, log=log)
    rep.timings.update(report.timings)
    rep.output = "pass" if report.passed else "fail"
    rep.lines.extend(report.text().rstrip("\n").split("\n"))
    rep.certificates = {s.name: s.passed for s in report.suites}
    rep.trace.append(report.as_dict())
    if not report.passed:
        rep.status = FAILED


COMMANDS = {
    "qe": (cmd_qe, "quantifier-free equivalent of a formula"),
    "decide": (cmd_decide, "truth of a sentence"),
    "dim": (cmd_dim, "dimension of a set"),
    "celldec": (cmd_celldec, "cylindrical cell decomposition"),
    "ordcheck": (cmd_ordcheck, "check the linear order axioms"),
    "reduce-order": (cmd_reduce_order, "monotone quotient of one dimension less"),
    "cutdef": (cmd_cutdef, "standard definition of a cut trace"),
    "eliminate": (cmd_eliminate, "define the type of a star point"),
    "oracle": (cmd_oracle, "atomwise type definition"),
    "verify": (cmd_verify, "type definition checked against the atomwise one"),
    "selftest": (cmd_selftest, "run the acceptance suites"),
}


def _common(p: argparse.ArgumentParser, top: bool):
    # subcommands suppress defaults so flags given before the command survive
    d = (lambda v: v) if top else (lambda v: argparse.SUPPRESS)
    p.add_argument("--json", action="store_true", default=d(False), help="print one JSON report")
    p.add_argument("--seed", type=int, default=d(0), help="random seed (default 0)")
    p.add_argument("--count", type=int, default=d(None), help="instances per randomized suite")
    p.add_argument("--iterate", action="store_true", default=d(False), help="reduce-order: iterate down to dimension 1")
    p.add_argument("--trace", action="store_true", default=d(False), help="print timings and trace to stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tame-elim")
    _common(parser, True)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_)
        _common(p, False)
        if name != "selftest":
            p.add_argument("file")
        if name == "eliminate":
            p.add_argument("--oracle", action="store_true", help="also print the atomwise result")
            p.add_argument("--verify", action="store_true", help="decide equivalence with the atomwise result")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return BAD_INPUT if e.code else OK
    if os.environ.get("TAME_ELIM_TRACE") == "1":
        args.trace = True
    if args.count is not None and args.count < 1:
        print("tame-elim: --count must be positive", file=sys.stderr)
        return BAD_INPUT
    rep = RunReport(args.command)
    fn = COMMANDS[args.command][0]
    try:
        fn(args, rep, _Clock(rep))
    except InputError as e:
        print(f"tame-elim: {e}", file=sys.stderr)
        return BAD_INPUT
    except (FormulaError, ParseError) as e:
        print(f"tame-elim: {e}", file=sys.stderr)
        return BAD_INPUT
    if args.json:
        print(json.dumps(rep.as_dict(args.trace), indent=2, sort_keys=True))
    else:
        for line in rep.lines:
            print(line)
    if args.trace:
        for item in rep.trace:
            print("trace:", json.dumps(item, sort_keys=True, default=str), file=sys.stderr)
        for k, v in rep.timings.items():
            print(f"time {k}: {v:.3f}s", file=sys.stderr)
    return rep.status


if __name__ == "__main__":
    sys.exit(main())
