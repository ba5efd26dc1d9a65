"""Run selected selftest suites with a progress line per suite.

    python scripts/run_suite.py --seed 0 --keys 1 6 --count 20
"""
import argparse
import sys

from tame_elim.selftest import SUITE_NAMES, run_selftest


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--count", type=int, default=None)
    ap.add_argument("--keys", type=int, nargs="*", default=None, choices=sorted(SUITE_NAMES)[:-1])
    args = ap.parse_args()
    report = run_selftest(args.seed, args.count, args.keys, log=lambda s: print(s, file=sys.stderr, flush=True))
    sys.stdout.write(report.text())
    for name, secs in report.timings.items():
        print(f"time {name}: {secs:.1f}s", file=sys.stderr)
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
