#!/usr/bin/env python3
"""Compute gamma2(J - F), the additive adversary bound (plain and
zero-on-agreement), and the multiplicative-sweep bound for every built-in
function up to a given arity, and print one table row per function.

Example:
    python3 scripts/corpus_bounds.py --max-n 2 --seed 0
"""

import argparse
import time

from advbound import bounds, gram


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=2)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--sweep", action="store_true",
                    help="also run the (slow) multiplicative sweep")
    args = ap.parse_args()

    header = f"{'function':>10} {'gamma2(J-F)':>12} {'adv':>10} {'adv_pm':>10}"
    if args.sweep:
        header += f" {'madv_sweep':>11} {'lam*adv/2':>10}"
    print(header)
    for f in gram.builtin_corpus(max_n=args.max_n, boolean_only=True):
        g = gram.build_gram_set(f)
        t0 = time.monotonic()
        g2 = bounds.gamma2(g.J - g.F).value
        a = bounds.adv(g.sigma_f, list(g.deltas), seed=args.seed)
        apm = bounds.adv(g.sigma_f, list(g.deltas), seed=args.seed, pm=True)
        row = f"{f.name:>10} {g2:12.6f} {a.value:10.6f} {apm.value:10.6f}"
        if args.sweep:
            sw = bounds.madv_sweep(g.sigma_f, list(g.deltas))
            row += f" {sw.value:11.6f} {a.value:10.6f}"
        row += f"   [{time.monotonic() - t0:5.1f}s, adv {a.status}]"
        print(row)


if __name__ == "__main__":
    main()
