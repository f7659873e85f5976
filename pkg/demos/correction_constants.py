"""How much must an order statistic of p-values be inflated to stay honest?

Solves the exact correction for a range of (n, k) choices and compares it
with the simple rule of thumb: report min(1, (n/k) * k-th smallest).  For the
left sample median (k about n/2) the rule is "twice the median", and the
table below shows how close the exact multiplier gets to n/k as k grows.

Run:  python demos/correction_constants.py
"""

import numpy as np

from orderpv import CombinerSpec, envelope

CASES = [(5, 1), (10, 5), (10, 10), (31, 16), (100, 50), (1000, 500), (10_000, 5_000)]

print(f"{'n':>6} {'k':>6} {'knee':>10} {'exact c':>10} {'n/k':>8} {'lower bd':>10}")
for n, k in CASES:
    spec = CombinerSpec.solve(n, k)
    lower = (n / k) / (1.0 + 5.0 * k ** (-1 / 3))
    print(f"{n:>6} {k:>6} {spec.knee:>10.6f} {spec.slope:>10.6f} {n/k:>8.3f} {lower:>10.6f}")

print()
print("The exact multiplier never exceeds n/k, so doubling the left sample")
print("median is always a conservative summary; it approaches n/k as k grows.")
print()

spec = CombinerSpec.solve(1000, 500)
print("Evaluating the corrected value for n=1000, k=500 at a few order statistics:")
print(f"{'u':>8} {'corrected':>12} {'min(1,2u)':>12}")
for u in (0.001, 0.01, 0.03, 0.1, 0.3, 0.5356, 0.7, 1.0):
    _, upper = envelope(1000, 500, u)
    print(f"{u:>8.4f} {spec.apply(u):>12.6f} {upper:>12.6f}")

print()
print(f"Below the knee ({spec.knee:.4f}) the correction is exactly linear with")
print(f"slope {spec.slope:.4f}; beyond it, it follows the binomial upper tail.")
print()

u = np.linspace(0.0, 0.5, 11)  # past ~0.54 the value saturates at 1 in doubles
print("Round trip through the inverse (worst absolute error on a grid):")
print(" ", np.max(np.abs(spec.invert(spec.apply(u)) - u)))
