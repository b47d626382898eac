#!/usr/bin/env python3
"""Regenerates tests/data/analytic_oracle.csv with 60-digit mpmath arithmetic.

p'  = 1 - (1 - d/(m+n))^m
p   = (m + n p') / (m + n)
p1  = p + (1 - p) (1 - (1 - d/(m+n))^(m d))
"""
import pathlib
from mpmath import mp, mpf

mp.dps = 60


def evaluate(n, m, d):
    n, m, d = mpf(n), mpf(m), mpf(d)
    x = d / (m + n)
    pp = 1 - (1 - x) ** m
    p = (m + n * pp) / (m + n)
    p1 = p + (1 - p) * (1 - (1 - x) ** (m * d))
    return pp, p, p1


cases = []
for d in (20, 40, 60, 80, 100):
    for m in range(50, 501, 50):
        cases.append((5000, m, d))
# spot values used by unit tests
cases += [(3, 2, 1), (5000, 500, 80), (0, 10, 5), (100, 0, 10), (5000, 50, 0)]

lines = ["n,m,d,p_prime,p,p1"]
for n, m, d in cases:
    vals = evaluate(n, m, d)
    lines.append(f"{n},{m},{d}," + ",".join(mp.nstr(v, 25, strip_zeros=False) for v in vals))

dest = pathlib.Path(__file__).resolve().parent.parent / "data" / "analytic_oracle.csv"
dest.write_text("\n".join(lines) + "\n")
print(f"wrote {len(cases)} rows to {dest}")
