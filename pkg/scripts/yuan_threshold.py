"""Scan the phase constant c of the special Lagrangian set for m = 3 and report
where midpoint convexity starts to hold.

Usage: python3 scripts/yuan_threshold.py [--pairs N] [--seed S]
"""
import argparse
import math

import numpy as np

from garding import universal_sets as us


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--pairs", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print("c,c_minus_pi_over_2,convex")
    for c in np.linspace(math.pi / 2 - 0.4, math.pi / 2 + 0.2, 13):
        v = us.convexity_probe(us.special_lagrangian(3, c), args.pairs, rng=args.seed)
        print(f"{c:.6f},{c - math.pi / 2:+.3f},{v.confirmed}")


if __name__ == "__main__":
    main()
