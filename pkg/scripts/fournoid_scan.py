"""Scan the four-ended family for parameters with unitarizable monodromy.

Usage: python scripts/fournoid_scan.py --mu -0.5 --a 0.8 --lo 1.0 --hi 2.0 --points 101
"""

import argparse
import functools

from cmc1 import catalog
from cmc1.period import period_solve


def build(p, mu, a):
    return catalog.fournoid(mu, a, p)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mu", type=float, default=-0.5)
    ap.add_argument("--a", type=float, default=0.8)
    ap.add_argument("--lo", type=float, default=1.0)
    ap.add_argument("--hi", type=float, default=2.0)
    ap.add_argument("--points", type=int, default=101)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    res = period_solve(functools.partial(build, mu=args.mu, a=args.a), args.lo, args.hi, points=args.points, workers=args.workers)
    print(res.table(), end="")
    for r in res.roots:
        print(f"p = {r.value:.10f}  defect = {r.defect:.3e}")


if __name__ == "__main__":
    main()
