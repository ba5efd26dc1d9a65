"""Count which maximum branch each random cut takes, per corpus order.

    python scripts/cut_branches.py --n 30
"""
import argparse
from collections import Counter

from tame_elim.corpus import corpus
from tame_elim.cutdef import cut_definable, is_cut, random_cutspec
from tame_elim.selftest import _rng


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n", type=int, default=30)
    args = ap.parse_args()
    rng = _rng(args.seed, 6)
    orders = corpus()
    counts: dict = {P.name: Counter() for P in orders}
    for i in range(args.n):
        P = orders[i % len(orders)]
        spec = random_cutspec(rng, P)
        if not is_cut(spec):
            counts[P.name]["not-a-cut"] += 1
            continue
        counts[P.name][cut_definable(spec, check=False).lam.get("branch", "base")] += 1
    for name, c in counts.items():
        print(f"{name}: " + ", ".join(f"{k}={v}" for k, v in sorted(c.items())))


if __name__ == "__main__":
    main()
