#!/usr/bin/env python3
"""Stress the constructive weight-window guarantees on random families:
log-uniform weights over six decades, sizes 2..500.  Reports the worst
observed weight ratio and size ratio against its floor.

Usage: python3 scripts/entropy_window_stress.py [--cases N] [--seed S]
"""

import argparse
import math
import random
import sys

from hfactor.entropy import WeightedFamily, entropy_window


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cases", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=6006)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    worst_weight = 1.0
    worst_margin = math.inf
    failures = 0
    for _ in range(args.cases):
        size = rng.randint(2, 500)
        weights = tuple(10.0 ** rng.uniform(-3.0, 3.0) for _ in range(size))
        rep = entropy_window(WeightedFamily(ids=tuple(range(size)), weights=weights))
        floor = math.exp(-(rep["deficit"] + math.log(3)) / 0.7)
        worst_weight = min(worst_weight, rep["weight_ratio"])
        worst_margin = min(worst_margin, rep["size_ratio"] - floor)
        if rep["weight_ratio"] <= 0.7 or rep["size_ratio"] < floor - 1e-12:
            failures += 1
    print(f"cases: {args.cases}")
    print(f"worst weight ratio: {worst_weight:.6f} (guarantee: > 0.7)")
    print(f"worst size-ratio margin over floor: {worst_margin:.6f}")
    print(f"failures: {failures}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
