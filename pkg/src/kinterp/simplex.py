"""Dense phase-1 simplex for linear feasibility, float or exact rational.

Solves: find x >= 0 with A_eq x = b_eq and A_ub x <= b_ub (b_ub >= 0).
Slack variables give a partial starting basis; artificial variables cover
the equality rows and phase 1 minimizes their sum.  Bland's rule keeps the
pivoting free of cycles, so termination is guaranteed.

With ``exact=True`` the tableau holds ``fractions.Fraction`` entries and
the feasible / infeasible answer is exact; the float path uses a tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = ["FeasibilityResult", "solve_feasibility"]

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
ITERATION_LIMIT = "iteration_limit"


@dataclass
class FeasibilityResult:
    status: str
    x: np.ndarray | None
    phase1_objective: float
    iterations: int


def solve_feasibility(
    A_eq,
    b_eq,
    A_ub=None,
    b_ub=None,
    exact: bool = False,
    max_iter: int = 20000,
    tol: float = 1e-9,
) -> FeasibilityResult:
    A_eq = np.asarray(A_eq, dtype=object if exact else float)
    b_eq = np.asarray(b_eq, dtype=object if exact else float)
    if A_ub is None:
        A_ub = np.zeros((0, A_eq.shape[1]))
        b_ub = np.zeros(0)
    A_ub = np.asarray(A_ub, dtype=object if exact else float)
    b_ub = np.asarray(b_ub, dtype=object if exact else float)
    if any(float(b) < 0 for b in b_ub):
        raise ValueError("upper-bound rows need b_ub >= 0")

    n = A_eq.shape[1]
    m_eq, m_ub = A_eq.shape[0], A_ub.shape[0]
    m = m_eq + m_ub
    width = n + m_ub + m_eq + 1  # slacks, artificials, RHS

    if exact:
        def conv(arr):
            return np.array(
                [Fraction(v) if not isinstance(v, Fraction) else v for v in arr.ravel()],
                dtype=object,
            ).reshape(arr.shape)

        A_eq, b_eq, A_ub, b_ub = conv(A_eq), conv(b_eq), conv(A_ub), conv(b_ub)
        zero = Fraction(0)
        T = np.full((m, width), zero, dtype=object)
        obj = np.full(width, zero, dtype=object)
        one = Fraction(1)
        is_neg = lambda v: v < 0
        is_pos = lambda v: v > 0
    else:
        zero, one = 0.0, 1.0
        T = np.zeros((m, width))
        obj = np.zeros(width)
        is_neg = lambda v: v < -tol
        is_pos = lambda v: v > tol

    basis = np.empty(m, dtype=int)
    for i in range(m_eq):
        row, b = A_eq[i], b_eq[i]
        if b < zero:
            row, b = -row, -b
        T[i, :n] = row
        T[i, n + m_ub + i] = one
        T[i, -1] = b
        basis[i] = n + m_ub + i
    for j in range(m_ub):
        i = m_eq + j
        T[i, :n] = A_ub[j]
        T[i, n + j] = one
        T[i, -1] = b_ub[j]
        basis[i] = n + j

    # phase-1 reduced costs c - z for cost = sum of artificials: the
    # artificial columns are basic with unit cost, so their entries start
    # at zero; artificials are also barred from re-entering the basis.
    for i in range(m_eq):
        obj = obj - T[i]
    for i in range(m_eq):
        obj[n + m_ub + i] = obj[n + m_ub + i] + one

    n_real = n + m_ub  # columns eligible to enter
    iterations = 0
    while iterations < max_iter:
        enter = -1
        for j in range(n_real):  # Bland: lowest negative-cost index
            if is_neg(obj[j]):
                enter = j
                break
        if enter < 0:
            break
        leave, best = -1, None
        for i in range(m):
            a = T[i, enter]
            if is_pos(a):
                ratio = T[i, -1] / a
                if (
                    best is None
                    or ratio < best
                    or (ratio == best and basis[i] < basis[leave])
                ):
                    best, leave = ratio, i
        if leave < 0:
            break  # no positive pivot: phase 1 cannot improve further
        T[leave] = T[leave] / T[leave, enter]
        col = T[:, enter].copy()
        col[leave] = zero
        T -= np.outer(col, T[leave])
        f = obj[enter]
        if f != zero:
            obj = obj - f * T[leave]
        basis[leave] = enter
        iterations += 1
    else:
        return FeasibilityResult(ITERATION_LIMIT, None, float("nan"), iterations)

    phase1 = -obj[-1]
    if exact:
        feasible = phase1 == 0
    else:
        feasible = abs(float(phase1)) <= tol * max(1.0, m)
    if not feasible:
        return FeasibilityResult(INFEASIBLE, None, float(phase1), iterations)
    x = np.full(n, zero, dtype=object) if exact else np.zeros(n)
    for i, b in enumerate(basis):
        if b < n:
            x[b] = T[i, -1]
    sol = np.array([float(v) for v in x])
    return FeasibilityResult(FEASIBLE, sol, float(phase1), iterations)
