"""K-functionals: exact engines where a closed form exists, numeric elsewhere.

The K-functional of x in a couple (X0, X1) at t > 0 is

    K(t, x) = inf { ||x0||_X0 + t ||x1||_X1 : x = x0 + x1 }.

Exact engines:

* weighted l^1 couples:  K(t, x) = sum_k |x_k| min(w0_k, t w1_k), with
  infinite-weight coordinates contributing through the finite leg only;
* (L^1, L^oo) and (l^1, l^oo):  K(t, x) = integral of the decreasing
  rearrangement of |x| up to t;
* (L^oo, L^oo(1/t)):  K(., h) is the least concave majorant of |h|.

Everything else runs through a numeric optimizer over pointwise splits.
For lattice couples the infimum may be restricted to sign-aligned splits
0 <= |x0| <= |x| (replacing x0 by its pointwise median with 0 and x never
increases either norm), which turns the problem into a search over
per-coordinate fractions.  The optimizer seeds with the one-parameter
truncation family x0 = sign(x) (|x| - c)_+ and refines by cyclic coordinate
descent; it returns an upper value plus a split witness, never a certified
lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .concave import ConcavePL, least_concave_majorant, upper_concave_envelope
from .couples import CoupleDescriptor
from .elements import (
    StepFunction,
    WeightedSeq,
    as_seq,
    decreasing_rearrangement,
    sequence_as_step,
)
from .grid import DyadicGrid, default_grid

__all__ = [
    "KCurve",
    "SplitWitness",
    "k_curve",
    "k_functional",
    "k_exact_weighted_l1",
    "k_curve_weighted_l1",
    "k_exact_l1_linf",
    "k_curve_l1_linf",
    "k_exact_linfty_couple",
    "k_curve_linfty_couple",
    "k_numeric",
    "k_curve_numeric",
    "conv_to_element",
    "ConvElement",
    "delta_sigma_norms",
]


@dataclass(frozen=True)
class KCurve:
    """A computed K-functional t -> K(t, x) with provenance.

    ``rel_accuracy`` is 0 for exact engines; for the numeric engine it is
    the optimizer's relative convergence threshold.  Numeric curves are
    upper estimates and are trustworthy on the grid they were built over.
    """

    curve: ConcavePL
    couple: CoupleDescriptor | None
    element: object
    method: str  # exact-weighted-l1 | exact-L1Linf | exact-hull | numeric
    rel_accuracy: float = 0.0

    def at(self, t):
        return self.curve.at(t)

    @property
    def is_exact(self) -> bool:
        return self.method.startswith("exact")


@dataclass(frozen=True)
class SplitWitness:
    """A decomposition x = x0 + x1 achieving the reported objective at t."""

    x0: object
    x1: object
    t: float
    objective: float

    def reconstructs(self, x, tol: float = 1e-12) -> bool:
        a = _raw_values(self.x0) + _raw_values(self.x1)
        b = _raw_values(x)
        scale = max(float(np.max(np.abs(b))), 1.0)
        return bool(np.all(np.abs(a - b) <= tol * scale))

    def to_json(self) -> dict:
        from .couples import element_to_json

        return {
            "x0": element_to_json(self.x0),
            "x1": element_to_json(self.x1),
            "t": self.t,
            "objective": self.objective,
        }


def _raw_values(x) -> np.ndarray:
    if isinstance(x, StepFunction):
        return x.values
    return as_seq(x)


# ---------------------------------------------------------------------------
# exact engine: weighted l^1 couples
# ---------------------------------------------------------------------------


def _weighted_l1_parts(x, w0, w1):
    xa = np.abs(as_seq(x))
    w0 = np.asarray(w0, dtype=float)
    w1 = np.asarray(w1, dtype=float)
    if not (xa.size == w0.size == w1.size):
        raise ValueError("element and weights must share a dimension")
    bad = np.isinf(w0) & np.isinf(w1) & (xa > 0)
    if np.any(bad):
        raise ValueError("coordinate with both weights infinite meets a nonzero entry")
    only0 = np.isinf(w1) & ~np.isinf(w0)  # coordinate lives in leg 0 only
    only1 = np.isinf(w0) & ~np.isinf(w1)  # coordinate lives in leg 1 only
    both = ~np.isinf(w0) & ~np.isinf(w1)
    alpha = float((xa[only0] * w0[only0]).sum())
    beta = float((xa[only1] * w1[only1]).sum())
    return xa, w0, w1, both, alpha, beta


def k_exact_weighted_l1(x, w0, w1, t: float) -> float:
    """K(t, x; l^1(w0), l^1(w1)) = sum |x_k| min(w0_k, t w1_k)."""
    if not t > 0:
        raise ValueError("t must be positive")
    xa, w0, w1, both, alpha, beta = _weighted_l1_parts(x, w0, w1)
    body = (xa[both] * np.minimum(w0[both], t * w1[both])).sum()
    return float(alpha + t * beta + body)


def k_curve_weighted_l1(x, w0, w1, couple=None) -> KCurve:
    """The full K-curve: piecewise linear with knots at t = w0_k / w1_k."""
    xa, w0a, w1a, both, alpha, beta = _weighted_l1_parts(x, w0, w1)
    active = both & (xa > 0)
    ratios = np.unique(w0a[active] / w1a[active])
    if ratios.size:
        body = (
            xa[active][None, :]
            * np.minimum(w0a[active][None, :], ratios[:, None] * w1a[active][None, :])
        ).sum(axis=1)
        knots_t = np.concatenate([[0.0], ratios])
        knots_y = np.concatenate([[alpha], alpha + beta * ratios + body])
    else:
        knots_t = np.array([0.0])
        knots_y = np.array([alpha])
    slope_end = beta  # all finite ramps are saturated past the largest ratio
    curve = ConcavePL(knots_t, knots_y, slope_end)
    if couple is None:
        couple = CoupleDescriptor.weighted_l1(w0, w1)
    return KCurve(curve, couple, WeightedSeq.of(x), "exact-weighted-l1")


# ---------------------------------------------------------------------------
# exact engine: (L^1, L^oo) and its counting-measure analogue
# ---------------------------------------------------------------------------


def k_curve_l1_linf(f: StepFunction, couple=None) -> KCurve:
    """K(t, f; L^1, L^oo) as the running integral of the rearrangement."""
    fstar = decreasing_rearrangement(f)
    vals = fstar.values
    if vals.size == 1 and vals[0] == 0.0:
        curve = ConcavePL(np.array([0.0]), np.array([0.0]), 0.0)
    else:
        increments = vals * fstar.widths
        knots_t = fstar.breaks
        knots_y = np.concatenate([[0.0], np.cumsum(increments)])
        curve = ConcavePL(knots_t, knots_y, 0.0)
    if couple is None:
        couple = CoupleDescriptor.function_lp(1.0, math.inf)
    return KCurve(curve, couple, f, "exact-L1Linf")


def k_exact_l1_linf(f: StepFunction, t: float) -> float:
    if not t > 0:
        raise ValueError("t must be positive")
    return float(k_curve_l1_linf(f).at(t))


# ---------------------------------------------------------------------------
# exact engine: the couple (L^oo, L^oo(1/t))
# ---------------------------------------------------------------------------


def k_curve_linfty_couple(h: StepFunction) -> KCurve:
    """K(., h) for the (L^oo, L^oo(1/t)) couple: least concave majorant of |h|."""
    curve = least_concave_majorant(h)
    return KCurve(curve, CoupleDescriptor.linfty_couple(), h, "exact-hull")


def k_exact_linfty_couple(h: StepFunction, t: float) -> float:
    if not t > 0:
        raise ValueError("t must be positive")
    return float(k_curve_linfty_couple(h).at(t))


# ---------------------------------------------------------------------------
# numeric engine
# ---------------------------------------------------------------------------


class _SplitProblem:
    """Sign-aligned pointwise split minimization in a two-legged lattice.

    Reduces both sequence and step-function couples to: values v >= 0 with
    per-leg effective weights (a0, a1) and exponents (p0, p1), minimizing

        ||s . v||_{p0, a0} + t ||(1-s) . v||_{p1, a1}  over s in [0, 1]^n.
    """

    def __init__(self, v, p0, a0, p1, a1):
        self.v = np.asarray(v, dtype=float)
        self.p0, self.p1 = float(p0), float(p1)
        self.a0 = np.asarray(a0, dtype=float)
        self.a1 = np.asarray(a1, dtype=float)

    @classmethod
    def from_couple(cls, x, couple: CoupleDescriptor) -> "_SplitProblem":
        if couple.kind in ("sequence_lp", "weighted_l1"):
            v = np.abs(as_seq(x))
            ones = np.ones_like(v)
            a0 = couple.w0 if couple.w0 is not None else ones
            a1 = couple.w1 if couple.w1 is not None else ones
            if np.any(np.isinf(a0)) or np.any(np.isinf(a1)):
                raise ValueError("numeric engine needs finite weights")
            return cls(v, couple.p, a0, couple.q, a1)
        if couple.kind == "function_lp":
            if not isinstance(x, StepFunction):
                raise TypeError("function couples act on StepFunction elements")
            v = np.abs(x.values)
            widths = x.widths
            a0 = widths ** (1.0 / couple.p) if math.isfinite(couple.p) else np.ones_like(v)
            a1 = widths ** (1.0 / couple.q) if math.isfinite(couple.q) else np.ones_like(v)
            return cls(v, couple.p, a0, couple.q, a1)
        raise ValueError(f"unsupported couple kind for the numeric engine: {couple.kind}")

    def _norm(self, vals, p, a):
        scaled = vals * a
        if math.isinf(p):
            return scaled.max(axis=-1) if scaled.size else 0.0
        return (scaled**p).sum(axis=-1) ** (1.0 / p)

    def objective(self, s, t):
        """Objective for fraction vectors s (last axis indexes coordinates)."""
        return self._norm(s * self.v, self.p0, self.a0) + t * self._norm(
            (1.0 - s) * self.v, self.p1, self.a1
        )

    # -- one-parameter seed families -----------------------------------------

    def _cap_grid(self, refine: int = 8) -> np.ndarray:
        levels = np.unique(self.v[self.v > 0])
        caps = [np.array([0.0]), levels]
        lo = np.concatenate([[0.0], levels[:-1]]) if levels.size else np.array([])
        for k in range(1, refine):
            caps.append(lo + (levels - lo) * k / refine)
        return np.unique(np.concatenate(caps))

    def seed_tables(self, refine: int = 8):
        """Leg norms along three one-parameter split families.

        Family 0 sends the spikes to leg 0 (x0 = (v - c)_+), the classical
        optimum shape when leg 1 is an l^oo.  Family 1 caps leg 0
        (x0 = min(v, c)), the equal-interior-level shape favoured when both
        exponents are finite.  Family 2 is the hard level cut
        (x0 = v 1{v > c}), covering optima where every coordinate sits at a
        bound.  Each entry: (A, B, family, caps).
        """
        caps = self._cap_grid(refine)
        families = (
            np.maximum(self.v[None, :] - caps[:, None], 0.0),
            np.minimum(self.v[None, :], caps[:, None]),
            self.v[None, :] * (self.v[None, :] > caps[:, None]),
        )
        tables = []
        for fam, x0 in enumerate(families):
            x1 = self.v[None, :] - x0
            A = np.atleast_1d(self._norm(x0, self.p0, self.a0))
            B = np.atleast_1d(self._norm(x1, self.p1, self.a1))
            tables.append((A, B, fam, caps))
        return tables

    def fractions_for_cap(self, c, family: int = 0):
        with np.errstate(divide="ignore", invalid="ignore"):
            if family == 0:
                s = np.where(self.v > 0, np.maximum(self.v - c, 0.0) / self.v, 0.0)
            elif family == 1:
                s = np.where(self.v > 0, np.minimum(self.v, c) / self.v, 0.0)
            else:
                s = (self.v > c).astype(float)
        return s

    # -- coordinate descent ----------------------------------------------------

    @property
    def descent_free(self) -> bool:
        """True when the seed families already contain the restricted optimum.

        For leg-1 exponent oo and leg-0 exponent <= 1 the optimal split is a
        truncation at one of the entry levels (the leg-0 objective has
        unbounded negative slope approaching each level), and the cap grid
        enumerates all levels.
        """
        return math.isinf(self.p1) and self.p0 <= 1.0

    def restarts(self) -> int:
        """Descents per seed family: the best cap alone can feed a local
        minimum while a nearby cap reaches the global one."""
        return 3 if self.v.size <= 12 else 1

    def refine(self, s, t, eps, max_sweeps=40, line_points=33):
        """Per-coordinate line-search descent on the split fractions.

        Small problems use steepest (best single move from the current
        point), which dodges the order traps of first-improvement sweeps;
        larger problems fall back to cyclic sweeps.
        """
        best = float(self.objective(s, t))
        n = self.v.size
        steepest = n <= 12
        active = [k for k in range(n) if self.v[k] != 0]
        for _ in range(max_sweeps * (n if steepest else 1)):
            prev = best
            if steepest:
                # no eps cut here: a tiny best move can unlock a large one,
                # so run until no single move improves at all
                move, move_val = None, best
                for k in active:
                    frac, val = self._line_min(s, k, t, line_points)
                    if val < move_val:
                        move_val, move = val, (k, frac)
                if move is None:
                    break
                best = move_val
                s = s.copy()
                s[move[0]] = move[1]
            else:
                for k in active:
                    frac, val = self._line_min(s, k, t, line_points)
                    if val < best:
                        best = val
                        s = s.copy()
                        s[k] = frac
                if prev - best <= eps * max(best, 1e-300):
                    break
        return s, best

    def _line_min(self, s, k, t, line_points, zooms=3):
        """Minimize the objective over s[k], zooming into the best bracket."""
        lo, hi = 0.0, 1.0
        best_frac, best_val = float(s[k]), math.inf
        for _ in range(zooms + 1):
            grid = np.linspace(lo, hi, line_points)
            trial = np.repeat(s[None, :], line_points, axis=0)
            trial[:, k] = grid
            objs = self.objective(trial, t)
            j = int(np.argmin(objs))
            if objs[j] < best_val:
                best_val, best_frac = float(objs[j]), float(grid[j])
            lo = float(grid[max(j - 1, 0)])
            hi = float(grid[min(j + 1, line_points - 1)])
        return best_frac, best_val


def _numeric_split(problem: _SplitProblem, t: float, eps: float):
    if problem.v.size == 0 or not np.any(problem.v > 0):
        return np.zeros_like(problem.v), 0.0
    polish = not problem.descent_free
    restarts = problem.restarts()
    best_s, best = None, math.inf
    for A, B, fam, caps in problem.seed_tables():
        objs = A + t * B
        order = np.argsort(objs, kind="stable")
        for j in order[: restarts if polish else 1]:
            s = problem.fractions_for_cap(caps[j], fam)
            val = float(objs[j])
            if polish:
                s, val = problem.refine(s, t, eps)
            if val < best:
                best_s, best = s, val
    return best_s, best


def k_numeric(x, couple: CoupleDescriptor, t: float, accuracy: float = 1e-8):
    """Upper value of K(t, x) over sign-aligned pointwise splits, plus witness.

    The value is an upper bound on the infimum; ``accuracy`` is the relative
    convergence threshold of the optimizer, not a certified error bound.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    if accuracy <= 0:
        raise ValueError("accuracy must be positive")
    problem = _SplitProblem.from_couple(x, couple)
    s, value = _numeric_split(problem, t, accuracy)
    witness = _witness_from_fractions(x, s, t, value)
    return value, witness


def _witness_from_fractions(x, s, t, value) -> SplitWitness:
    if isinstance(x, StepFunction):
        x0 = StepFunction(x.breaks, s * x.values)
        x1 = StepFunction(x.breaks, x.values - x0.values)
    else:
        vals = as_seq(x)
        x0 = WeightedSeq(s * vals)
        x1 = WeightedSeq(vals - x0.values)
    return SplitWitness(x0, x1, float(t), float(value))


def k_curve_numeric(
    x, couple: CoupleDescriptor, grid: DyadicGrid | None = None, accuracy: float = 1e-8
) -> KCurve:
    """Numeric K-curve: optimized per grid node, then the concave envelope.

    The true K-functional is concave, so the least concave majorant of the
    per-node upper values is still an upper estimate and restores exact
    membership in the cone.  The curve is trustworthy on the grid range.
    """
    grid = grid or default_grid()
    problem = _SplitProblem.from_couple(x, couple)
    ts = grid.points()
    if problem.v.size == 0 or not np.any(problem.v > 0):
        return KCurve(ConcavePL(np.array([0.0]), np.array([0.0])), couple, x, "numeric", 0.0)
    polish = not problem.descent_free
    restarts = problem.restarts()
    vals = np.full(ts.shape, np.inf)
    for A, B, fam, caps in problem.seed_tables():
        table = A[:, None] + ts[None, :] * B[:, None]
        vals = np.minimum(vals, table.min(axis=0))
        if polish:
            order = np.argsort(table, axis=0, kind="stable")
            for i, t in enumerate(ts):
                for j in order[:restarts, i]:
                    s = problem.fractions_for_cap(caps[j], fam)
                    _, v = problem.refine(s, t, accuracy)
                    vals[i] = min(vals[i], v)
    curve = upper_concave_envelope(ts, vals)
    return KCurve(curve, couple, x, "numeric", accuracy)


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def _exact_curve_or_none(x, couple: CoupleDescriptor) -> KCurve | None:
    if couple.kind == "weighted_l1":
        return k_curve_weighted_l1(x, couple.w0, couple.w1, couple)
    if couple.kind == "linfty_couple":
        return k_curve_linfty_couple(x)
    if couple.kind == "function_lp" and couple.p == 1.0 and math.isinf(couple.q):
        return k_curve_l1_linf(x, couple)
    if (
        couple.kind == "sequence_lp"
        and couple.p == 1.0
        and math.isinf(couple.q)
        and couple.w0 is None
    ):
        inner = k_curve_l1_linf(sequence_as_step(x))
        return KCurve(inner.curve, couple, WeightedSeq.of(x), "exact-L1Linf")
    return None


def k_curve(
    x, couple: CoupleDescriptor, grid: DyadicGrid | None = None, accuracy: float = 1e-8
) -> KCurve:
    """K-curve of x in a couple; exact engine when one exists, else numeric."""
    exact = _exact_curve_or_none(x, couple)
    if exact is not None:
        return exact
    return k_curve_numeric(x, couple, grid, accuracy)


def k_functional(x, couple: CoupleDescriptor, t: float, accuracy: float = 1e-8) -> float:
    """K(t, x) as a scalar; exact when an engine exists."""
    exact = _exact_curve_or_none(x, couple)
    if exact is not None:
        return float(exact.at(t))
    value, _ = k_numeric(x, couple, t, accuracy)
    return value


def delta_sigma_norms(x, couple: CoupleDescriptor) -> tuple[float, float]:
    """(Delta-norm, Sigma-norm) = (max of leg norms, K(1, x))."""
    n0, n1 = couple.leg_norms(x)
    return max(n0, n1), k_functional(x, couple, 1.0)


# ---------------------------------------------------------------------------
# realizing cone functions as elements of a dyadic weighted l^1 couple
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvElement:
    """A nonnegative element of (l^1, l^1(2^-k)) extended by two edge atoms.

    The atom at index -oo carries the constant part alpha of the target
    function, the atom at +oo its terminal slope beta, and the dyadic atom
    at n carries mass b_n whose K-ramp min(1, t 2^-n) saturates at scale 2^n.
    """

    ns: np.ndarray
    masses: np.ndarray
    alpha: float
    beta: float

    def couple(self) -> CoupleDescriptor:
        w0 = np.concatenate([[1.0], np.ones(self.ns.size), [math.inf]])
        w1 = np.concatenate([[math.inf], 2.0 ** (-self.ns.astype(float)), [1.0]])
        return CoupleDescriptor.weighted_l1(w0, w1)

    def element(self) -> WeightedSeq:
        return WeightedSeq(np.concatenate([[self.alpha], self.masses, [self.beta]]))

    def reconstruction(self) -> KCurve:
        return k_curve(self.element(), self.couple())

    def total_mass(self) -> float:
        return float(self.alpha + self.beta + self.masses.sum())

    def equivalence_band(self, phi: ConcavePL, grid: DyadicGrid | None = None):
        """Measured (low, high) of reconstruction/target over the dyadic range."""
        grid = grid or default_grid()
        ts = grid.points()
        lo, hi = 2.0 ** float(self.ns[0]), 2.0 ** float(self.ns[-1])
        ts = ts[(ts >= lo) & (ts <= hi)]
        target = phi.at(ts)
        got = self.reconstruction().at(ts)
        mask = target > 0
        if not np.any(mask):
            return (1.0, 1.0)
        r = got[mask] / target[mask]
        return (float(r.min()), float(r.max()))


def conv_to_element(phi: ConcavePL, n_min: int, n_max: int) -> ConvElement:
    """Dyadic-atom element whose K-curve tracks a cone function.

    Decomposes phi = alpha + beta t + phi0 (alpha the limit at 0+, beta the
    terminal slope) and converts phi0's average slopes d_n over the dyadic
    intervals (2^{n-1}, 2^n] into atom masses b_n = 2^n (d_n - d_{n+1}).
    The reconstructed piecewise ramp sum interpolates phi0 at the octave
    points 2^n inside [2^n_min, 2^n_max]; the fit outside that range is not
    asserted, and the per-instance equivalence band is measurable via
    ``ConvElement.equivalence_band``.
    """
    if n_min > n_max:
        raise ValueError("need n_min <= n_max")
    alpha = phi.value_at_zero_plus
    beta = phi.terminal_slope
    ns = np.arange(n_min, n_max + 1)
    pts = 2.0 ** np.arange(n_min - 1, n_max + 2).astype(float)
    phi0 = phi.at(pts) - alpha - beta * pts
    d = np.diff(phi0) / np.diff(pts)  # average slope per dyadic interval
    L = ns.size  # d[i] covers the interval ending at 2^(n_min + i)
    masses = (2.0 ** ns.astype(float)) * np.maximum(d[:L] - d[1 : L + 1], 0.0)
    masses[np.abs(masses) < 1e-15 * max(phi.last_value, 1e-300)] = 0.0
    return ConvElement(ns, masses, float(alpha), float(beta))
