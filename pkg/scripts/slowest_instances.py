"""Time individual random instances of the QE and type-definition suites.

    python scripts/slowest_instances.py --suite qe --n 100 --top 10
"""
import argparse
import time

from tame_elim.engine import define_type, oracle_define_type, random_instance, verify_equivalence
from tame_elim.selftest import _rng, check_qe_instance, random_quantified
from tame_elim.syntax import to_sexp


def qe_case(rng):
    f = random_quantified(rng)
    err = check_qe_instance(f)
    return to_sexp(f), err


def type_case(rng):
    delta, xs, ys, a = random_instance(rng)
    r = define_type(delta, xs, ys, a)
    o = oracle_define_type(delta, xs, ys, a)
    v = verify_equivalence(delta, xs, ys, a, r, o)
    return to_sexp(delta), None if v else v.reason


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--suite", choices=["qe", "types"], default="qe")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--top", type=int, default=10)
    args = ap.parse_args()
    rng = _rng(args.seed, 1 if args.suite == "qe" else 2)
    case = qe_case if args.suite == "qe" else type_case
    rows = []
    for i in range(args.n):
        t = time.perf_counter()
        text, err = case(rng)
        rows.append((time.perf_counter() - t, i, text, err))
    rows.sort(reverse=True)
    print(f"total {sum(r[0] for r in rows):.1f}s over {args.n} instances")
    for secs, i, text, err in rows[: args.top]:
        print(f"{secs:7.2f}s #{i} {'FAIL ' + err if err else 'ok'} {text[:120]}")


if __name__ == "__main__":
    main()
