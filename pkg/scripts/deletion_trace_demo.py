#!/usr/bin/env python3
"""Run one edge-deletion trace from the complete host and summarize it:
per-step destroyed fraction vs its exact mean, the centered walk, and the
log factor count against the pure-gamma prediction.

Usage: python3 scripts/deletion_trace_demo.py [--pattern {matching,triangle}] [--n N] [--seed S]
"""

import argparse
import sys

from hfactor.pattern import complete_pattern
from hfactor.process import run_process

PATTERNS = {"matching": complete_pattern(2), "triangle": complete_pattern(3)}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--pattern", choices=sorted(PATTERNS), default="triangle")
    ap.add_argument("--n", type=int, default=9)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    trace = run_process(PATTERNS[args.pattern], args.n, seed=args.seed)
    print(f"initial log factor count: {trace.log_initial:.4f}")
    print(f"{'i':>3} {'xi':>10} {'gamma':>10} {'x_partial':>10} "
          f"{'logPhi':>9} {'margin':>8} guard")
    for s in trace.steps:
        print(f"{s.i:>3} {str(s.xi):>10} {str(s.gamma):>10} "
              f"{float(s.x_partial):>10.4f} {s.log_factor_count:>9.4f} "
              f"{s.margin:>8.3f} {'ok' if s.guard_ok else 'tripped'}")
    print(f"stopped at step {trace.stop_step} ({trace.stop_reason}); "
          f"guard trip step: {trace.guard_trip_step}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
