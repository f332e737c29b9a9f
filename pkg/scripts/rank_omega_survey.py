"""Survey rank(omega) and the dimension triple on random admissible lattice data.

Prints a histogram of rank(omega) values and how often the Riemann-Roch route
and the lattice formula agree (they should always agree).
"""
import argparse
import random
from collections import Counter

from residual_calc import randgen
from residual_calc.errors import CalculusError
from residual_calc.family import dimension_triple, rank_omega


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--instances", type=int, default=500)
    ap.add_argument("--max-rank", type=int, default=5)
    ap.add_argument("--max-p", type=int, default=3)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    ranks = Counter()
    failures = 0
    for _ in range(args.instances):
        g, c, es = randgen.rand_instance(rng, args.max_rank, args.max_p)
        try:
            ranks[rank_omega(c, es, g, randgen.rand_vector(rng, g.rank))] += 1
            dimension_triple(c, es, g)
        except CalculusError as exc:
            failures += 1
            print("failure:", exc.to_dict())
    print(f"{args.instances} instances, {failures} failures")
    for r in sorted(ranks):
        print(f"rank(omega) = {r:>3}: {ranks[r]}")


if __name__ == "__main__":
    main()
