#!/usr/bin/env python3
"""Tabulate the direct-product, XOR, phase, and threshold bound formulas
across a range of copy counts k, for a given per-copy adversary value.

Example:
    python3 scripts/dpt_tables.py --adv 1.414 --delta 0.9 --k-max 16
"""

import argparse

from advbound import dpt


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--adv", type=float, default=1.0)
    ap.add_argument("--delta", type=float, default=0.9)
    ap.add_argument("--k-max", type=int, default=16)
    ap.add_argument("--K", type=int, default=10)
    ap.add_argument("--mu", type=float, default=1.0)
    args = ap.parse_args()

    print(f"{'k':>4} {'sdpt':>12} {'xor':>12} {'phase':>12} {'threshold':>12}")
    for k in range(1, args.k_max + 1):
        p = dpt.DptParams(k=k, delta=args.delta, K=args.K, mu=args.mu)
        sd, _ = dpt.sdpt_bounds(p, args.adv)
        xo, _ = dpt.xor_bounds(p, args.adv)
        _, ph = dpt.phase_sdpt_bound(p, args.adv)
        th, _ = dpt.threshold_tail(p)
        print(f"{k:>4} {sd:12.5f} {xo:12.5f} {ph:12.5f} {th:12.5e}")


if __name__ == "__main__":
    main()
