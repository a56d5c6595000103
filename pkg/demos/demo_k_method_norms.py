"""Norms of the real K-method: parameters, orbit norms, and cover bounds.

A parameter lattice E on (0, oo) induces the norm ||K(., x)||_E.  This
script evaluates the classical power-weight parameters, shows the
two-code-path identity for them, takes an orbit norm, and runs the
finite-cover upper bound for the orbit parameter.
"""

import numpy as np

from kinterp import (
    CoupleDescriptor,
    DyadicGrid,
    EHatNorm,
    ParameterLattice,
    SpaceLeg,
    e_hat_upper,
    k_curve,
    k_space_norm,
    lions_peetre_norm,
    orbit_norm,
    quasi_norm,
)

couple = CoupleDescriptor.sequence_lp(1.0, np.inf)
grid = DyadicGrid(-12, 12, 4)
x = np.array([2.0, 1.0, 0.25, 0.25])

print("=" * 70)
print("1. Power-weight parameters and the induced norms")
print("=" * 70)
theta, r = 0.5, 2.0
E = ParameterLattice.lions_peetre(theta, r, grid)
a = k_space_norm(x, couple, E)
b = lions_peetre_norm(x, couple, theta, r, grid)
print(f"||x|| via parameter lattice   : {a:.8f}")
print(f"||x|| via direct quadrature   : {b:.8f}   (same definition, two paths)")

E_cap = ParameterLattice.intersection(
    ParameterLattice.lions_peetre(0.3, 1.0, grid),
    ParameterLattice.lions_peetre(0.7, 1.0, grid),
)
print(f"intersection parameter norm = max of members: {k_space_norm(x, couple, E_cap):.6f}")

print()
print("=" * 70)
print("2. Orbit norms: sup_t K(t, y) / K(t, x), exact over the knots")
print("=" * 70)
cy = k_curve(np.array([1.0, 1.0]), couple)
cx = k_curve(np.array([2.0, 0.0]), couple)
print(f"y = (1,1) against x = (2,0): orbit norm {orbit_norm(cy, cx):.6f}")
print(f"x against y: {orbit_norm(cx, cy):.6f}")

print()
print("=" * 70)
print("3. Finite-cover upper bound for the orbit parameter")
print("=" * 70)
cfg = EHatNorm(couple, SpaceLeg("seq", 1.0), p=1.0, q=1.0, budget=64,
               grid=DyadicGrid(-8, 8, 2))
f = k_curve(np.array([1.0, 0.0]), couple, grid=cfg.grid)
cover = e_hat_upper(f, cfg)
witness = [[float(v) for v in np.round(e.values, 6)] for e in cover.elements]
print(f"f = K(., e1): cover value {cover.value:.6f} with "
      f"{len(cover.elements)} element(s) {witness}")

g = k_curve(np.array([0.5, 0.5, 0.5]), couple, grid=cfg.grid)
cover2 = e_hat_upper(g, cfg)
sum_norm = sum(quasi_norm(e, cfg.base_leg) for e in cover2.elements)
print(f"f = K(., (0.5,0.5,0.5)): upper value {cover2.value:.6f} "
      f"from {len(cover2.elements)} atoms (q = 1 cost = {sum_norm:.6f})")
ok = np.all(cover2.k_power_sum(cfg) >= g.at(cfg.grid.points()) * (1 - 1e-9))
print(f"cover dominates the curve on the grid: {bool(ok)}")
