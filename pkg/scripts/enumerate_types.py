"""Print the end-order types allowed under a total curvature budget.

Usage: python scripts/enumerate_types.py --rho 4
"""

import argparse

from cmc1.verify import enumerate_types, excluded_types, table_comparison


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rho", type=float, default=4.0, help="budget TA / 2pi")
    ap.add_argument("--raw", action="store_true", help="skip the named nonexistence results")
    args = ap.parse_args()

    for c in enumerate_types(args.rho, case_analyses=not args.raw):
        bound = ">" if c.ta_min_strict else ">="
        print(f"{c.label:24s} TA/2pi {bound} {c.ta_min_over_2pi:g}")
    if not args.raw:
        for label, rule in excluded_types(args.rho):
            print(f"excluded {label:15s} by {rule}")
        rep = table_comparison(args.rho)
        print(f"table check: {rep.verdict} ({rep.finding})")


if __name__ == "__main__":
    main()
