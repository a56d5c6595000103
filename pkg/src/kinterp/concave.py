"""Piecewise-linear concave nondecreasing functions and concave envelopes.

``ConcavePL`` represents members of the cone of nonnegative, nondecreasing,
concave functions on [0, oo) vanishing at 0.  Every K-functional computed by
this package is stored as one.

A member may jump at the origin: ``knots[0] = (0, y0)`` stores the limit
from the right, so y0 > 0 encodes f(0) = 0 but f(0+) = y0.  (K-functionals
of elements carrying mass that lives in one leg only have exactly this
shape; a knot list pinned to y0 = 0 could not represent them exactly.)
Past the last knot the function continues with a constant ``terminal_slope``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elements import StepFunction

__all__ = [
    "ConcavePL",
    "upper_concave_envelope",
    "least_concave_majorant",
]

MERGE_TOL = 1e-12  # relative tolerance for collapsing collinear knots


@dataclass(frozen=True)
class ConcavePL:
    knots_t: np.ndarray
    knots_y: np.ndarray
    terminal_slope: float = 0.0

    def __post_init__(self):
        t = np.asarray(self.knots_t, dtype=float)
        y = np.asarray(self.knots_y, dtype=float)
        if t.ndim != 1 or t.shape != y.shape or t.size == 0:
            raise ValueError("knots_t and knots_y must be equal-length 1-D arrays")
        if t[0] != 0.0:
            raise ValueError("first knot must sit at t = 0")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("knot abscissae must be strictly increasing")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(y))):
            raise ValueError("knots must be finite")
        if not np.isfinite(self.terminal_slope) or self.terminal_slope < 0:
            raise ValueError("terminal slope must be finite and nonnegative")
        ok, worst = _cone_slack(t, y, self.terminal_slope)
        if not ok:
            raise ValueError(
                f"knots violate the concave nondecreasing cone (slack {worst:.3e})"
            )
        t.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "knots_t", t)
        object.__setattr__(self, "knots_y", y)

    # -- basic queries ----------------------------------------------------

    @property
    def value_at_zero_plus(self) -> float:
        return float(self.knots_y[0])

    @property
    def last_value(self) -> float:
        return float(self.knots_y[-1])

    @property
    def is_conv0(self) -> bool:
        """In the subcone with zero limit at 0 and zero slope at infinity."""
        return self.value_at_zero_plus == 0.0 and self.terminal_slope == 0.0

    def initial_slope(self) -> float:
        """lim_{t->0+} f(t)/t; inf when the function jumps at 0."""
        if self.value_at_zero_plus > 0.0:
            return np.inf
        if self.knots_t.size > 1:
            return float((self.knots_y[1] - self.knots_y[0]) / self.knots_t[1])
        return float(self.terminal_slope)

    def at(self, t):
        """Evaluate (vectorized).  At t = 0 this returns the limit f(0+)."""
        scalar = np.ndim(t) == 0
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t_arr < 0):
            raise ValueError("domain is [0, oo)")
        out = np.interp(t_arr, self.knots_t, self.knots_y)
        beyond = t_arr > self.knots_t[-1]
        if np.any(beyond):
            out[beyond] = self.knots_y[-1] + self.terminal_slope * (
                t_arr[beyond] - self.knots_t[-1]
            )
        return float(out[0]) if scalar else out

    def validate(self, slack: float = 1e-9) -> tuple[bool, float]:
        """Check the cone invariants; returns (ok, worst_normalized_slack).

        The slack is normalized by the value scale (monotonicity and
        nonnegativity) and the slope scale (concavity), so the same
        threshold works across magnitudes.
        """
        return _cone_slack(self.knots_t, self.knots_y, self.terminal_slope, slack)

    # -- algebra -----------------------------------------------------------

    def scaled(self, c: float) -> "ConcavePL":
        if c < 0:
            raise ValueError("only nonnegative scaling keeps the cone")
        return ConcavePL(self.knots_t, c * self.knots_y, c * self.terminal_slope)

    def __add__(self, other: "ConcavePL") -> "ConcavePL":
        t = np.unique(np.concatenate([self.knots_t, other.knots_t]))
        y = self.at(t) + other.at(t)
        return ConcavePL(t, y, self.terminal_slope + other.terminal_slope)


def _cone_slack(t, y, terminal_slope, slack: float = 1e-9):
    """Worst violation of {nondecreasing, concave, nonneg, terminal cap}.

    Returns (ok, worst) where worst <= 0 means clean and the comparison
    uses ``worst >= -slack``.
    """
    yscale = max(float(np.max(np.abs(y))), 1e-300)
    worst = min(0.0, float(np.min(y)) / yscale)  # nonnegativity
    if y.size > 1:
        dy = np.diff(y)
        worst = min(worst, float(np.min(dy)) / yscale)  # monotone
        dt = np.diff(t)
        slopes = dy / dt
        sscale = max(float(np.max(np.abs(slopes))), terminal_slope, 1e-300)
        if slopes.size > 1:
            worst = min(worst, float(np.min(-np.diff(slopes))) / sscale)
        worst = min(worst, float(slopes[-1] - terminal_slope) / sscale)
    return worst >= -slack, worst


def _merge_collinear(t, y, terminal_slope, tol=MERGE_TOL):
    """Drop interior knots that sit on the chord of their neighbours."""
    if len(t) <= 2:
        return np.asarray(t, float), np.asarray(y, float)
    keep = [0]
    for i in range(1, len(t) - 1):
        a = keep[-1]
        chord = y[a] + (y[i + 1] - y[a]) * (t[i] - t[a]) / (t[i + 1] - t[a])
        scale = max(abs(y[i]), abs(y[a]), abs(y[i + 1]), 1e-300)
        if abs(y[i] - chord) > tol * scale:
            keep.append(i)
    keep.append(len(t) - 1)
    t_out, y_out = np.asarray(t, float)[keep], np.asarray(y, float)[keep]
    # a terminal knot collinear with the terminal ray is also redundant
    if t_out.size > 1:
        s = (y_out[-1] - y_out[-2]) / (t_out[-1] - t_out[-2])
        if abs(s - terminal_slope) <= tol * max(abs(s), terminal_slope, 1e-300):
            t_out, y_out = t_out[:-1], y_out[:-1]
    return t_out, y_out


def _upper_hull(points):
    """Monotone-chain upper hull of (t, y) points sorted by t."""
    hull = []
    for p in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            cross = (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1)
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def upper_concave_envelope(ts, ys, merge_tol: float = MERGE_TOL) -> ConcavePL:
    """Least element of the cone dominating the given points.

    Points with equal abscissae keep the highest ordinate; the point (0, 0)
    is always part of the constraint set.  The result is constant after the
    last hull vertex (terminal slope 0): any positive slope there would not
    be least, and a decreasing continuation would leave the cone.
    """
    ts = np.asarray(ts, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if ts.shape != ys.shape or ts.ndim != 1:
        raise ValueError("need matching 1-D point arrays")
    if np.any(ts < 0):
        raise ValueError("points must have t >= 0")
    if np.any(ys < -0.0):
        ys = np.maximum(ys, 0.0)
    # dedupe by t keeping the max y, with (0, 0) always present
    order = np.lexsort((-ys, ts))
    ts, ys = ts[order], ys[order]
    keep_t, keep_y = [0.0], [0.0]
    for t, y in zip(ts, ys):
        if t == keep_t[-1]:
            keep_y[-1] = max(keep_y[-1], y)
        else:
            keep_t.append(t)
            keep_y.append(y)
    hull = _upper_hull(list(zip(keep_t, keep_y)))
    # walk the hull while it rises; stop at the maximum and continue flat
    t_out, y_out = [hull[0][0]], [hull[0][1]]
    for t, y in hull[1:]:
        if y <= y_out[-1]:
            break
        t_out.append(t)
        y_out.append(y)
    t_arr, y_arr = _merge_collinear(t_out, y_out, 0.0, merge_tol)
    return ConcavePL(t_arr, y_arr, 0.0)


def least_concave_majorant(
    h: StepFunction, domain_cap: float | None = None, merge_tol: float = MERGE_TOL
) -> ConcavePL:
    """Least concave majorant of |h| on (0, oo) for a step function h.

    A nondecreasing concave dominator of |h| is pinned down by the
    upper-left corner of each piece: g >= |v_i| on (t_{i-1}, t_i] is
    equivalent to g(t_{i-1}+) >= |v_i|.  The majorant is therefore the
    upper concave envelope of the corner set {(t_{i-1}, |v_i|)} together
    with (0, 0), continued flat after the last relevant corner.  With
    ``domain_cap`` only the restriction of |h| to (0, cap] is majorized.
    """
    lefts = h.breaks[:-1]
    vals = np.abs(h.values)
    keep = vals > 0.0
    if domain_cap is not None:
        if domain_cap <= 0:
            raise ValueError("domain cap must be positive")
        keep &= lefts < domain_cap
    lefts, vals = lefts[keep], vals[keep]
    return upper_concave_envelope(lefts, vals, merge_tol)
