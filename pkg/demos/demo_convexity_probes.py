"""Convexification algebra and one-sided convexity probes.

The p-convexification re-reads a lattice's algebra so that quasi-Banach
questions become Banach ones; the probes hunt for witness families that
bound convexity constants from the computable side.
"""

import numpy as np

from kinterp import (
    SpaceLeg,
    convexify_element,
    l_convexity_probe,
    oplus,
    pq_convexity_probe,
    quasi_norm,
)

print("=" * 70)
print("1. Convexified norms and the oplus algebra")
print("=" * 70)
leg1 = SpaceLeg("seq", 1.0)
x = np.array([1.5, 0.5])
view = convexify_element(x, 2.0, leg1)
print(f"||x||_1 = {quasi_norm(x, leg1)}, convexified norm ||x||^(1/2) = {view.norm:.6f}")
a, b = np.array([0.7, 0.0]), np.array([0.0, 1.9])
print(f"oplus on disjoint supports: {np.round(oplus(a, b, 2.0), 6)} (plain sum)")
print(f"oplus(x, 0) = x: {np.allclose(oplus(x, np.zeros(2), 2.0), x)}")

print()
print("=" * 70)
print("2. (p,q)-convexity probe (lower bounds only)")
print("=" * 70)
for p in (0.5, 1.0):
    est = pq_convexity_probe(SpaceLeg("seq", p), p, p, budget=100, dim=8, rng=0)
    print(f"l^{p} probed at (p,p) = ({p},{p}): bound {est.bound:.6f}  (true constant 1)")
est = pq_convexity_probe(SpaceLeg("seq", 0.5), 1.0, 1.0, budget=100, dim=8, rng=0)
print(f"l^0.5 probed at (1,1): bound {est.bound:.3f} -- grows with the family size,")
print("so l^0.5 is NOT (1,1)-convex; the probe only ever reports what it found.")

print()
print("=" * 70)
print("3. L-convexity probe (upper bound on the admissible epsilon)")
print("=" * 70)
for p in (1.0, 0.5):
    est = l_convexity_probe(SpaceLeg("seq", p), budget=300, dim=8, rng=0)
    print(f"l^{p}: admissible epsilon <= {est.bound:.4f} over the searched families")
print("one-sided by design: the true constants are suprema over infinite families.")
