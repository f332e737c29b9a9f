"""Stabilization invariance across truncations and model sizes, with timings.

For each (truncation, max rank) cell, draws random Kuranishi models and
stabilizing bundles and counts instances where the localized class changes.
"""
import argparse
import random
import time

from residual_calc import randgen
from residual_calc.class_ring import RingContext
from residual_calc.family import localized_class, stabilize


def sweep_cell(rng, truncation, max_rank, instances):
    ctx = RingContext.build(truncation, z=1, a=1, b=1, c=2)
    base = ("a", "b", "c")
    bad = 0
    t0 = time.perf_counter()
    for _ in range(instances):
        k = randgen.rand_kuranishi(rng, ctx, base, max_v=max_rank + 1, max_w=max_rank)
        g = randgen.rand_honest(rng, ctx, base, max_rank)
        if localized_class(stabilize(k, g, "z"), "z") != localized_class(k, "z"):
            bad += 1
    return bad, time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--instances", type=int, default=50)
    ap.add_argument("--truncations", type=int, nargs="+", default=[3, 4, 5, 6])
    ap.add_argument("--max-ranks", type=int, nargs="+", default=[1, 2, 3])
    args = ap.parse_args()
    rng = random.Random(args.seed)
    print("trunc  max_rank  instances  mismatches  seconds")
    for t in args.truncations:
        for r in args.max_ranks:
            bad, dt = sweep_cell(rng, t, r, args.instances)
            print(f"{t:>5}  {r:>8}  {args.instances:>9}  {bad:>10}  {dt:>7.3f}")


if __name__ == "__main__":
    main()
