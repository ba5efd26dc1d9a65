"""The acceptance suites, run with a fixed seed and summarized in a deterministic text report.

Timings are collected separately from the report text so that two runs with
the same seed produce identical reports.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .bruteforce import brute_eval, endpoint_grid
from .cells import EMPTY, cell_decompose, dim
from .corpus import corpus, lex_square, line, random_qf, random_star
from .cutdef import (
    CutSpec, convex_hull_shortcut, cut_definable, is_cut, one_dim_trace, random_cutspec, trace_on,
    verify_cut,
)
from .engine import define_type, oracle_define_type, random_instance, verify_equivalence
from .formula import (
    FALSE, Formula, LinTerm, compare, conj, disj, eq, evaluate, exists, forall, is_quantifier_free,
    lt, make_atom, neg,
)
from .ordkit import (
    check_linear_order, class_convexity, class_dim_partition, closed_rays_locus, finite_class_locus,
    interval_dim_relation, l_dimensional_interval, quotient_reduce,
)
from .qe import equivalent, fm_qe, is_satisfiable, qe
from .star import eval_star, mu_star, standard_points_1d, standard_trace
from .starnum import EPS, OMEGA, normalize, std
from .syntax import scalar_sexp, to_sexp

DEFAULT_COUNTS = {1: 500, 2: 300, 5: 100, 6: 100, 7: 50}
SUITE_NAMES = {
    1: "qe-soundness",
    2: "type-definitions",
    3: "quotient-certificates",
    4: "order-lemmas",
    5: "measure-lemma",
    6: "cut-definitions",
    7: "base-case",
    8: "determinism-budget",
}
BUDGET_SECONDS = 600


@dataclass
class SuiteResult:
    key: int
    name: str
    total: int
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def lines(self) -> list[str]:
        mark = "PASS" if self.passed else "FAIL"
        out = [f"[{mark}] {self.key} {self.name}: {self.total - len(self.failures)}/{self.total} ok"]
        out += [f"    {n}" for n in self.notes]
        out += [f"    failure: {f}" for f in self.failures[:10]]
        return out


@dataclass
class SelftestReport:
    seed: int
    count: int | None
    suites: list
    timings: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)

    def text(self) -> str:
        head = f"selftest seed={self.seed} count={'default' if self.count is None else self.count}"
        body = [line_ for s in self.suites for line_ in s.lines()]
        tail = f"overall: {'PASS' if self.passed else 'FAIL'}"
        return "\n".join([head] + body + [tail]) + "\n"

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "count": self.count,
            "passed": self.passed,
            "suites": [
                {"key": s.key, "name": s.name, "passed": s.passed, "total": s.total,
                 "failures": s.failures, "notes": s.notes}
                for s in self.suites
            ],
        }


def _rng(seed: int, key: int) -> random.Random:
    return random.Random(f"tame-elim/{seed}/{key}")


def _n(count, key: int) -> int:
    return DEFAULT_COUNTS[key] if count is None else count


def _orders(count):
    orders = corpus()
    return orders if count is None else orders[: max(1, min(count, len(orders)))]


# ---------------------------------------------------------------------------
# 1. Quantifier elimination


def random_quantified(rng: random.Random) -> Formula:
    """At most three quantifiers, at most eight atoms, coefficients in [-5, 5]."""
    free = ["a", "b"][: rng.randint(0, 2)]
    bound = ["x", "y", "z"][: rng.randint(1, 3)]
    n = rng.randint(2, 8)

    def q(v, body):
        return (exists if rng.random() < 0.5 else forall)(v, body)

    if rng.random() < 0.6 or len(bound) == 1:
        body = random_qf(rng, free + bound, n, coef=5)
        for v in reversed(bound):
            body = q(v, body)
        return body
    k = rng.randint(1, n - 1)
    inner = random_qf(rng, free + bound, n - k, coef=5)
    for v in reversed(bound[1:]):
        inner = q(v, inner)
    outer = random_qf(rng, free + bound[:1], k, coef=5)
    return q(bound[0], conj(outer, inner) if rng.random() < 0.5 else disj(outer, inner))


def check_qe_instance(f: Formula) -> str | None:
    g = qe(f)
    if not is_quantifier_free(g):
        return f"quantifiers left: {to_sexp(f)}"
    if not equivalent(g, fm_qe(f)):
        return f"FM and VS disagree: {to_sexp(f)}"
    for env in endpoint_grid(g, sorted(f.free_vars)):
        if brute_eval(f, env) != evaluate(g, env):
            pt = ", ".join(f"{k}={scalar_sexp(v)}" for k, v in sorted(env.items()))
            return f"brute force disagrees at {pt}: {to_sexp(f)}"
    return None


def suite_qe(seed: int, count=None) -> SuiteResult:
    rng = _rng(seed, 1)
    n = _n(count, 1)
    res = SuiteResult(1, SUITE_NAMES[1], n)
    for i in range(n):
        err = check_qe_instance(random_quantified(rng))
        if err:
            res.failures.append(f"#{i} {err}")
    return res


# ---------------------------------------------------------------------------
# 2. Type definitions


def suite_types(seed: int, count=None) -> SuiteResult:
    rng = _rng(seed, 2)
    n = _n(count, 2)
    res = SuiteResult(2, SUITE_NAMES[2], n)
    cut_levels = 0
    for i in range(n):
        delta, xs, ys, a = random_instance(rng)
        try:
            r1 = define_type(delta, xs, ys, a, check=True)
        except Exception as e:  # certificate or engine error is a failure of this instance
            res.failures.append(f"#{i} {type(e).__name__}: {e}")
            continue
        r2 = oracle_define_type(delta, xs, ys, a)
        v = verify_equivalence(delta, xs, ys, a, r1, r2)
        if not v:
            res.failures.append(f"#{i} {v.reason} at {v.witness}: {to_sexp(delta)}")
        cut_levels += sum(1 for lv in r1.trace if lv.form not in ("X", "base") and "constant" not in lv.detail)
    res.notes.append(f"atoms through the cut construction: {cut_levels}")
    return res


# ---------------------------------------------------------------------------
# 3. Quotient certificates


def suite_quotients(seed: int, count=None) -> SuiteResult:
    orders = _orders(count)
    res = SuiteResult(3, SUITE_NAMES[3], len(orders) + 1)
    for P in orders:
        chk = check_linear_order(P)
        if not chk.ok:
            res.failures.append(f"{P.name}: not a linear order")
            continue
        q = quotient_reduce(P)
        flags = " ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in q.certificates.items())
        res.notes.append(f"{P.name}: dim {P.dim} -> {q.dim_target}; {flags}")
        if not q.ok:
            res.failures.append(f"{P.name}: {flags}")
    # the relation 'interval of dimension < 1' does not lower the dimension
    P = lex_square()
    literal = quotient_reduce(P, threshold=1)
    ours = quotient_reduce(P, threshold=2)
    note = (f"lex-square divergence: threshold 1 dim_drop={literal.certificates['dim_drop']}, "
            f"threshold 2 dim_drop={ours.certificates['dim_drop']}")
    res.notes.append(note)
    if literal.certificates["dim_drop"] or not ours.certificates["dim_drop"]:
        res.failures.append(note)
    return res


# ---------------------------------------------------------------------------
# 4. Lemmas about a single order


def suite_lemmas(seed: int, count=None) -> SuiteResult:
    orders = _orders(count)
    res = SuiteResult(4, SUITE_NAMES[4], len(orders))
    for P in orders:
        l = P.dim
        bad = []
        if l_dimensional_interval(P) is None:
            bad.append("no l-dimensional interval")
        dr = dim(closed_rays_locus(P), P.coords)
        if not (dr is EMPTY or dr <= 1):
            bad.append(f"closed rays locus has dim {dr}")
        for d in range(1, l + 1):
            rel = interval_dim_relation(P, d)
            if not class_convexity(P, rel):
                bad.append(f"~{d} classes not convex")
            if not all(k is EMPTY or k < d for _, k in class_dim_partition(P, rel)):
                bad.append(f"~{d} class of dim >= {d}")
        df = dim(finite_class_locus(P, interval_dim_relation(P, l)), P.coords)
        if not (df is EMPTY or df < l):
            bad.append(f"finite-class locus has dim {df}")
        res.notes.append(f"{P.name}: l={l} rays-dim={_d(dr)} finite-locus-dim={_d(df)}")
        if bad:
            res.failures.append(f"{P.name}: " + "; ".join(bad))
    return res


def _d(k) -> str:
    return "empty" if k is EMPTY else str(k)


# ---------------------------------------------------------------------------
# 5. Measure lemma


def random_components(rng: random.Random, k_max: int = 4) -> list[tuple[Fraction, Fraction]]:
    k = rng.randint(1, k_max)
    pts = sorted(rng.sample(range(-12, 13), 2 * k))
    return [(Fraction(pts[2 * i], 2), Fraction(pts[2 * i + 1], 2)) for i in range(k)]


def _interval(t: LinTerm, lo, hi, lo_strict=True, hi_strict=True) -> Formula:
    return conj(compare(lo, "<" if lo_strict else "<=", t), compare(t, "<" if hi_strict else "<=", hi))


def suite_measure(seed: int, count=None) -> SuiteResult:
    rng = _rng(seed, 5)
    n = _n(count, 5)
    res = SuiteResult(5, SUITE_NAMES[5], n)
    t = LinTerm.var("t")
    for i in range(n):
        comps = random_components(rng)
        A = disj([_interval(t, c, d) for c, d in comps])
        mu_a = sum((d - c for c, d in comps), Fraction(0))
        fat, thin = [], []
        for c, d in comps:
            lo = normalize(c + EPS * rng.choice([-2, -1, 1, 2]))
            hi = normalize(d + EPS * rng.choice([-2, -1, 1, 2]))
            fat.append(_interval(t, lo, hi, rng.random() < 0.5, rng.random() < 0.5))
            for q in (c, d, Fraction(rng.randint(-24, 24), 4)):
                if rng.random() < 0.6:
                    k = rng.choice([1, 2, 3])
                    s = rng.choice([1, -1])
                    ends = sorted([normalize(q + EPS * s * k), normalize(q + EPS * s * (k + 1))])
                    thin.append(_interval(t, ends[0], ends[1], True, rng.random() < 0.5))
        B, D = disj(fat), disj(thin) if thin else FALSE
        errs = []
        if is_satisfiable(conj(A, neg(standard_trace(B)))):
            errs.append("A not inside B")
        if std(mu_star(B, "t")) != mu_a or not mu_a > 0:
            errs.append(f"std mu(B) = {std(mu_star(B, 't'))}, mu(A) = {mu_a}")
        if D is not FALSE:
            if is_satisfiable(standard_trace(D)):
                errs.append("translate has standard points")
            if std(mu_star(D, "t")) != 0:
                errs.append(f"std mu of translates = {std(mu_star(D, 't'))}")
        if errs:
            res.failures.append(f"#{i} " + "; ".join(errs))
    return res


# ---------------------------------------------------------------------------
# 6. Cut definitions


def cut_probes(P, spec: CutSpec, rng: random.Random, n_random: int = 200) -> list[tuple]:
    """Cell samples and band endpoints of P, their midpoints, and random rationals."""
    m = len(P.coords)
    pts = []
    for cell in cell_decompose(P.carrier, P.coords):
        if cell.guard is FALSE:
            continue
        env = cell.sample()
        base = [env[c].evaluate({}) if isinstance(env[c], LinTerm) else env[c] for c in P.coords]
        pts.append(tuple(base))
        for i, piece in enumerate(cell.pieces):
            if not piece.is_band:
                continue
            sub = {c: LinTerm.constant(v) for c, v in zip(P.coords[:i], base)}
            for end in (piece.lo, piece.hi):
                if end is None:
                    continue
                e = end.substitute(sub).evaluate({})
                for v in (e, (e + base[i]) / 2):
                    pts.append(tuple(base[:i]) + (v,) + tuple(base[i + 1:]))
    consts = sorted({Fraction(std(c)) for c in _constants(spec.V) if abs(std(c)) != float("inf")})
    for c in consts:
        for i in range(m):
            for p in list(pts[: 4 * m]):
                pts.append(p[:i] + (c,) + p[i + 1:])
    for _ in range(n_random):
        pts.append(tuple(Fraction(rng.randint(-8, 24), rng.randint(1, 16)) for _ in range(m)))
    return pts


def _constants(f: Formula):
    from .formula import atoms

    return [a.term.const for a in atoms(f)]


def counterexample_spec() -> CutSpec:
    """On the line: V = (0, 1) together with the infinite point omega."""
    u = LinTerm.var("u1")
    V = disj(conj(lt(0, u), lt(u, 1)), eq(u, OMEGA))
    return CutSpec(line(), V, "open-interval-plus-omega")


def suite_cuts(seed: int, count=None) -> SuiteResult:
    rng = _rng(seed, 6)
    n = _n(count, 6)
    orders = corpus()
    res = SuiteResult(6, SUITE_NAMES[6], n + 1)
    branches: dict = {}
    for i in range(n):
        P = orders[i % len(orders)]
        spec = random_cutspec(rng, P)
        chk = is_cut(spec)
        if not chk.ok:
            res.failures.append(f"#{i} {P.name}: generated V is not a cut ({chk.witness})")
            continue
        r = cut_definable(spec, check=False)
        b = r.lam.get("branch", "base") if r.lam else "base"
        branches[b] = branches.get(b, 0) + 1
        if not verify_cut(spec, r, cut_probes(P, spec, rng)):
            res.failures.append(f"#{i} {P.name}: {to_sexp(spec.V)}")
    res.notes.append("maximum cases: " + ", ".join(f"{k}={v}" for k, v in sorted(branches.items())))
    spec = counterexample_spec()
    chk = is_cut(spec)
    hull = convex_hull_shortcut(spec)
    differs = not equivalent(hull, trace_on(spec))
    res.notes.append(f"counterexample: is_cut={chk.ok} witness={_pair(chk.witness)}; "
                     f"hull shortcut {to_sexp(hull)} vs trace {to_sexp(trace_on(spec))}")
    if chk.ok or chk.witness is None or not differs:
        res.failures.append("counterexample not rejected or hull shortcut agrees with the trace")
    return res


def _pair(w) -> str:
    if w is None:
        return "none"
    return " < ".join("(" + " ".join(scalar_sexp(v) for v in p) + ")" for p in w)


# ---------------------------------------------------------------------------
# 7. One-dimensional base case


def random_star_set(rng: random.Random, t: LinTerm, k_max: int = 4) -> Formula:
    items = []
    for _ in range(rng.randint(1, k_max)):
        k = rng.choice([1, 1, 2, -1, Fraction(1, 2)])
        items.append(make_atom(t * k - random_star(rng), rng.choice(["<", "<=", "=", "<"])))
    f = items[0]
    for g in items[1:]:
        f = conj(f, g) if rng.random() < 0.5 else disj(f, g)
    return neg(f) if rng.random() < 0.2 else f


def random_standard_1d(rng: random.Random, t: LinTerm) -> Formula:
    parts = []
    for c, d in random_components(rng, 3):
        r = rng.random()
        if r < 0.2:
            parts.append(eq(t, c))
        else:
            parts.append(_interval(t, c, d, rng.random() < 0.5, rng.random() < 0.5))
    if rng.random() < 0.3:
        parts.append(lt(t, -7))
    return disj(parts)


def suite_base(seed: int, count=None) -> SuiteResult:
    rng = _rng(seed, 7)
    n = _n(count, 7)
    res = SuiteResult(7, SUITE_NAMES[7], n)
    t = LinTerm.var("t")
    u1, u2 = LinTerm.var("u1"), LinTerm.var("u2")
    for i in range(n):
        A = random_standard_1d(rng, t)
        B = random_star_set(rng, t)
        f = conj(A, B)
        got = standard_points_1d(f, "t")
        oracle = standard_trace(f)
        errs = []
        if not equivalent(got, oracle):
            errs.append(f"differs from conversion table: {to_sexp(got)} vs {to_sexp(oracle)}")
        ends = sorted({Fraction(std(a.term.const)) / -a.term.coeff("t")
                       for a in _atoms_of(f) if abs(std(a.term.const)) != float("inf")})
        dense = set(Fraction(k, 16) for k in range(-160, 161, 3))
        dense |= set(ends) | {e + d for e in ends for d in (Fraction(-1), Fraction(1), Fraction(1, 1000), Fraction(-1, 1000))}
        dense |= {(p + q) / 2 for p, q in zip(ends, ends[1:])}
        for q in sorted(dense):
            if evaluate(got, {"t": q}) != eval_star(f, {"t": q}):
                errs.append(f"membership differs at t={scalar_sexp(q)}")
                break
        # the same on a curve in the plane
        k = Fraction(rng.randint(-2, 2))
        c = Fraction(rng.randint(-4, 4), 2)
        curve = conj(eq(u2, u1 * k + c), lt(-3, u1), lt(u1, 3))
        V = random_star_set(rng, u1 if rng.random() < 0.5 else u2)
        tr, _ = one_dim_trace(curve, ("u1", "u2"), V)
        if not equivalent(tr, conj(curve, standard_trace(V))):
            errs.append(f"curve trace differs: {to_sexp(V)}")
        if errs:
            res.failures.append(f"#{i} {to_sexp(f)}: " + "; ".join(errs))
    return res


def _atoms_of(f: Formula):
    from .formula import atoms

    return atoms(f)


# ---------------------------------------------------------------------------
# Driver


SUITES: dict[int, Callable] = {
    1: suite_qe, 2: suite_types, 3: suite_quotients, 4: suite_lemmas,
    5: suite_measure, 6: suite_cuts, 7: suite_base,
}


def run_selftest(seed: int = 0, count: int | None = None, keys=None, log=None) -> SelftestReport:
    """Run the suites; ``log`` (if given) receives one line per finished suite with its time."""
    keys = sorted(keys or SUITES)
    report = SelftestReport(seed, count, [])
    start = time.perf_counter()
    for k in keys:
        if k == 8:
            continue
        t0 = time.perf_counter()
        r = SUITES[k](seed, count)
        report.timings[SUITE_NAMES[k]] = time.perf_counter() - t0
        report.suites.append(r)
        if log:
            log(f"{SUITE_NAMES[k]}: {'pass' if r.passed else 'FAIL'} in {report.timings[SUITE_NAMES[k]]:.1f}s")
    report.timings["total"] = time.perf_counter() - start
    return report


def determinism_result(first: SelftestReport, second_text: str, elapsed: float) -> SuiteResult:
    res = SuiteResult(8, SUITE_NAMES[8], 2)
    if first.text() != second_text:
        res.failures.append("reports differ between two runs with the same seed")
    if elapsed >= BUDGET_SECONDS:
        res.failures.append(f"full run took {elapsed:.0f}s, budget {BUDGET_SECONDS}s")
    return res


__all__ = [
    "SuiteResult", "SelftestReport", "run_selftest", "determinism_result", "random_quantified",
    "check_qe_instance", "counterexample_spec", "cut_probes", "random_components", "random_star_set",
    "random_standard_1d", "SUITES", "SUITE_NAMES", "DEFAULT_COUNTS", "BUDGET_SECONDS",
]
