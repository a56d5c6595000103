"""Why (l^p, l^q) with p < 1 cannot have the relative operator property.

Uniform vectors x_n = (1,...,1)/n have ||x_n||_{l^p} / ||x_n||_{l^1}
= n^{1/p-1}, unbounded for p < 1, while sup_t K(t, x_n) recovers the
l^p norm.  A uniformly bounded transfer of K-domination into a Banach
target would force that ratio to stay bounded: the table below is the
contradiction made concrete.
"""

import numpy as np

from kinterp import non_cm_demo

p = 0.5
rows = non_cm_demo(p, np.inf, n_max=16)
print(f"p = {p}: ratio ||x_n||_p / ||x_n||_1 = n^(1/p - 1) = n")
print(f"{'n':>4} {'ratio_lp_l1':>14} {'analytic':>14} {'sup_K':>14}")
for row in rows:
    print(
        f"{row['n']:>4} {row['ratio_lp_l1']:>14.6f} "
        f"{row['analytic']:>14.6f} {row['sup_K']:>14.6f}"
    )
ratios = np.array([r["ratio_lp_l1"] for r in rows])
print(f"\nstrictly increasing: {bool(np.all(np.diff(ratios) > 0))}")
print("no bound C can dominate every row: the operator property fails for p < 1.")
