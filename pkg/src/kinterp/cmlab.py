"""K-domination checks, operator witnesses, and monotonicity probes.

For the couple (l^1, l^oo) the operator norms are linear in the matrix
entries (max absolute column sum / max absolute row sum), so the existence
of T with Tx = y and both norms <= C is an exact linear feasibility
question; ``cm_witness_l1_linf`` solves it with the internal dense simplex
(exact rational pivoting for exact inputs in small dimension).

For exponents below 1 no operator-norm computation is attempted (the
problem is nonconvex); the failure of the Calderon-Mityagin property there
is demonstrated through the norm-ratio blow-up of ``non_cm_demo``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from numbers import Rational

import numpy as np

from .couples import CoupleDescriptor, SpaceLeg, quasi_norm
from .elements import WeightedSeq, as_seq
from .grid import DyadicGrid, default_grid
from .kfunctional import k_curve, k_functional

__all__ = [
    "k_dominates",
    "OperatorWitness",
    "cm_witness_l1_linf",
    "MonotonicityEstimate",
    "kpq_probe",
    "non_cm_demo",
]

WITNESS_DIM_CAP = 16
EXACT_DIM_CAP = 8


def k_dominates(
    y,
    x,
    couple_y: CoupleDescriptor,
    couple_x: CoupleDescriptor | None = None,
    grid: DyadicGrid | None = None,
    slack: float = 0.0,
) -> tuple[bool, float]:
    """Check K(t, y) <= K(t, x) at every knot, grid node and both ends.

    Returns (dominated, margin) with margin = min over the evaluation set
    of K(t, x) - K(t, y); the asymptotic slopes are compared directly.
    """
    couple_x = couple_x or couple_y
    grid = grid or default_grid()
    cy = k_curve(y, couple_y, grid=grid)
    cx = k_curve(x, couple_x, grid=grid)
    ts = np.unique(
        np.concatenate([cy.curve.knots_t, cx.curve.knots_t, grid.points()])
    )
    ts = ts[ts > 0]
    margin = float((cx.at(ts) - cy.at(ts)).min()) if ts.size else 0.0
    ok = margin >= -slack
    # ends: jumps at 0+ and terminal slopes
    if cy.curve.value_at_zero_plus > cx.curve.value_at_zero_plus + slack:
        ok = False
        margin = min(margin, cx.curve.value_at_zero_plus - cy.curve.value_at_zero_plus)
    if cy.curve.terminal_slope > cx.curve.terminal_slope + slack:
        ok = False
    return ok, margin


@dataclass(frozen=True)
class OperatorWitness:
    """A couple operator witnessing K-domination, or its certified absence."""

    matrix: np.ndarray | None
    norm_l1: float  # max absolute column sum
    norm_linf: float  # max absolute row sum
    residual: float  # ||T x - y||_oo
    status: str  # feasible | infeasible | iteration_limit

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"

    def to_json(self) -> dict:
        return {
            "matrix": None if self.matrix is None else [list(r) for r in self.matrix],
            "norms": [self.norm_l1, self.norm_linf],
            "residual": self.residual,
            "status": self.status,
        }


def _all_rational(arr) -> bool:
    return all(isinstance(v, Rational) for v in arr)


def cm_witness_l1_linf(
    x,
    y,
    bound: float = 1.0,
    exact: bool | None = None,
    max_iter: int = 20000,
) -> OperatorWitness:
    """Find T with Tx = y, ||T||_{l1->l1} <= C and ||T||_{loo->loo} <= C.

    Absolute values are handled by sign-splitting T = P - N with P, N >= 0;
    the constraints are then linear and a phase-1 simplex decides
    feasibility.  With rational inputs in dimension <= 8 (or exact=True)
    the pivoting runs over Fractions and the answer is exact for the LP as
    posed; otherwise double precision with a 1e-9 feasibility tolerance.
    """
    from .simplex import solve_feasibility

    x_raw = list(x) if not isinstance(x, (WeightedSeq, np.ndarray)) else list(as_seq(x))
    y_raw = list(y) if not isinstance(y, (WeightedSeq, np.ndarray)) else list(as_seq(y))
    n = len(x_raw)
    if len(y_raw) != n:
        raise ValueError("x and y must share a dimension")
    if n > WITNESS_DIM_CAP:
        raise ValueError(f"dimension {n} above the witness cap {WITNESS_DIM_CAP}")
    if exact is None:
        exact = n <= EXACT_DIM_CAP and _all_rational(x_raw + y_raw) and isinstance(
            bound, Rational
        )

    # variables: P (row-major n*n), then N (row-major n*n)
    nn = n * n
    A_eq = [[0] * (2 * nn) for _ in range(n)]
    for i in range(n):
        for j in range(n):
            A_eq[i][i * n + j] = x_raw[j]
            A_eq[i][nn + i * n + j] = -x_raw[j]
    b_eq = y_raw

    # column sums (l1 -> l1) and row sums (loo -> loo) of P + N
    A_ub = [[0] * (2 * nn) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            A_ub[j][i * n + j] = 1
            A_ub[j][nn + i * n + j] = 1
            A_ub[n + i][i * n + j] = 1
            A_ub[n + i][nn + i * n + j] = 1
    b_ub = [bound] * (2 * n)

    res = solve_feasibility(A_eq, b_eq, A_ub, b_ub, exact=exact, max_iter=max_iter)
    if res.status != "feasible":
        return OperatorWitness(None, math.nan, math.nan, math.nan, res.status)
    P = res.x[:nn].reshape(n, n)
    N = res.x[nn:].reshape(n, n)
    T = P - N
    norm_l1 = float(np.abs(T).sum(axis=0).max())
    norm_linf = float(np.abs(T).sum(axis=1).max())
    residual = float(np.abs(T @ np.asarray(x_raw, float) - np.asarray(y_raw, float)).max())
    return OperatorWitness(T, norm_l1, norm_linf, residual, "feasible")


# ---------------------------------------------------------------------------
# K(p,q)-monotonicity probe
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MonotonicityEstimate:
    """Running one-sided estimate of the (p,q)-monotonicity constant."""

    trials: int
    worst_ratio: float
    witness: tuple | None


def kpq_ratio(
    x,
    family,
    space: SpaceLeg,
    couple: CoupleDescriptor,
    p: float,
    q: float,
    grid: DyadicGrid | None = None,
) -> tuple[bool, float]:
    """(hypothesis holds on the grid, ||x|| / (sum ||x_i||^q)^{1/q})."""
    grid = grid or default_grid()
    ts = grid.points()
    envelope = np.zeros_like(ts)
    for row in family:
        envelope += k_curve(row, couple, grid=grid).at(ts) ** p
    envelope **= 1.0 / p
    kvals = k_curve(x, couple, grid=grid).at(ts)
    holds = bool(np.all(kvals <= envelope * (1 + 1e-9) + 1e-300))
    den = float(sum(quasi_norm(row, space) ** q for row in family) ** (1.0 / q))
    ratio = quasi_norm(x, space) / den if den > 0 else 0.0
    return holds, ratio


def kpq_probe(
    space: SpaceLeg,
    couple: CoupleDescriptor,
    p: float,
    q: float,
    trials: int,
    dim: int = 8,
    pieces: int = 4,
    rng=None,
    grid: DyadicGrid | None = None,
) -> MonotonicityEstimate:
    """Search for (x, {x_i}) with K(t,x) <= (sum K(t,x_i)^p)^{1/p} on the grid
    and record the worst ratio ||x|| / (sum ||x_i||^q)^{1/q}.

    Instances are built to satisfy the hypothesis by construction: a random
    combination of the pieces is scaled until its K-curve sits under the
    p-sum envelope.  One-sided: the true constant is at least the estimate.
    """
    if not (0 < q <= p <= 1):
        raise ValueError("exponents must satisfy 0 < q <= p <= 1")
    if trials < 1:
        raise ValueError("trials must be positive")
    grid = grid or default_grid()
    rng = np.random.default_rng(rng)
    ts = grid.points()
    worst, witness = 0.0, None
    for _ in range(trials):
        fam = rng.random((pieces, dim)) * (rng.random((pieces, dim)) < 0.6)
        if not np.any(fam):
            continue
        envelope = np.zeros_like(ts)
        for row in fam:
            envelope += k_curve(row, couple, grid=grid).at(ts) ** p
        envelope **= 1.0 / p
        cand = fam.sum(axis=0) * (0.5 + rng.random(dim))
        kc = k_curve(cand, couple, grid=grid).at(ts)
        mask = kc > 0
        if not np.any(mask):
            continue
        lam = float((envelope[mask] / kc[mask]).min()) * (1 - 1e-12)
        xs = cand * lam
        holds, ratio = kpq_ratio(xs, fam, space, couple, p, q, grid)
        if holds and ratio > worst:
            worst, witness = ratio, (xs, fam)
    return MonotonicityEstimate(trials, worst, witness)


# ---------------------------------------------------------------------------
# the norm-ratio blow-up for p < 1
# ---------------------------------------------------------------------------


def non_cm_demo(p: float, q: float = math.inf, n_max: int = 64) -> list[dict]:
    """Ratio table showing why (l^p, l^q) with p < 1 cannot transfer to a
    Banach target with uniformly bounded operators.

    For x_n = (1, ..., 1, 0, ...)/n the ratio ||x_n||_{l^p} / ||x_n||_{l^1}
    equals n^{1/p - 1} exactly and grows without bound, while
    sup_t K(t, x_n; l^p, l^q) recovers ||x_n||_{l^p}; a uniform operator
    bound would force this ratio to stay bounded.
    """
    if not 0 < p < 1:
        raise ValueError("the blow-up needs 0 < p < 1")
    if not q > p:
        raise ValueError("need q > p")
    couple = CoupleDescriptor.sequence_lp(p, q)
    leg_p = SpaceLeg("seq", p)
    leg_1 = SpaceLeg("seq", 1.0)
    rows = []
    for n in range(1, n_max + 1):
        x = np.full(n, 1.0 / n)
        ratio = quasi_norm(x, leg_p) / quasi_norm(x, leg_1)
        analytic = float(n ** (1.0 / p - 1.0))
        sup_k = k_functional(x, couple, t=float(2.0**20), accuracy=1e-10)
        rows.append(
            {
                "n": n,
                "ratio_lp_l1": ratio,
                "analytic": analytic,
                "sup_K": sup_k,
            }
        )
    return rows
