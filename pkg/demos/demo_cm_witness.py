"""Operator witnesses for K-domination in (l^1, l^oo).

For this couple, K-domination is not just necessary but sufficient for the
existence of a norm-1 couple operator T with Tx = y, and the operator
norms are linear in the entries, so a witness (or its certified absence)
comes out of an exact linear feasibility solve.
"""

from fractions import Fraction

import numpy as np

from kinterp import CoupleDescriptor, DyadicGrid, cm_witness_l1_linf, k_dominates

couple = CoupleDescriptor.sequence_lp(1.0, np.inf)
grid = DyadicGrid(-8, 8, 2)

print("=" * 70)
print("1. A dominated pair and its witness")
print("=" * 70)
x = np.array([2.0, 0.0])
y = np.array([1.0, 1.0])
ok, margin = k_dominates(y, x, couple, grid=grid)
print(f"K(., y) <= K(., x): {ok} (worst margin {margin:.3f})")
w = cm_witness_l1_linf(list(x), list(y), 1.0)
print(f"witness status {w.status}; T =\n{w.matrix}")
print(f"column-sum norm {w.norm_l1:.3f}, row-sum norm {w.norm_linf:.3f}, "
      f"residual {w.residual:.1e}")

print()
print("=" * 70)
print("2. Exact rational pivoting for exact inputs")
print("=" * 70)
wx = cm_witness_l1_linf([Fraction(2), Fraction(0)], [Fraction(1), Fraction(1)], Fraction(1))
print(f"rational inputs -> exact feasibility: {wx.status}")
bad = cm_witness_l1_linf([Fraction(1), Fraction(0)], [Fraction(2), Fraction(0)], Fraction(1))
print(f"y = 2x at bound 1 -> certified {bad.status} (no tolerance involved)")

print()
print("=" * 70)
print("3. Batch audit: contraction images are always feasible at C = 1")
print("=" * 70)
rng = np.random.default_rng(7)
feasible = 0
trials = 50
for _ in range(trials):
    n = int(rng.integers(2, 9))
    xr = rng.normal(size=n)
    T0 = rng.normal(size=(n, n))
    T0 /= max(np.abs(T0).sum(axis=0).max(), np.abs(T0).sum(axis=1).max()) * (1 + 1e-12)
    yr = T0 @ xr
    wr = cm_witness_l1_linf(list(xr), list(yr), 1.0 + 1e-6)
    feasible += wr.feasible
print(f"{feasible}/{trials} random dominated pairs feasible at C = 1 + 1e-6")
