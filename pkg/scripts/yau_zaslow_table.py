"""Print Yau-Zaslow coefficients n_delta for several c2 values as a table.

    python3 scripts/yau_zaslow_table.py --c2 1 24 48 --delta-max 12
"""
import argparse

from residual_calc.nodal import yau_zaslow_series


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--c2", type=int, nargs="+", default=[1, 24])
    ap.add_argument("--delta-max", type=int, default=10)
    args = ap.parse_args()
    series = {c2: yau_zaslow_series(c2, args.delta_max) for c2 in args.c2}
    widths = {c2: max(len(str(c2)), len(str(s[args.delta_max]))) for c2, s in series.items()}
    print("delta  " + "  ".join(f"{f'c2={c2}':>{widths[c2] + 3}}" for c2 in args.c2))
    for d in range(args.delta_max + 1):
        print(f"{d:>5}  " + "  ".join(f"{series[c2][d]:>{widths[c2] + 3}}" for c2 in args.c2))


if __name__ == "__main__":
    main()
