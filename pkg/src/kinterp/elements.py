"""Concrete lattice elements: finite sequences and step functions on (0, oo).

These two representations carry every computation in the package.  Sequences
live in (weighted) l^p legs; step functions live in L^p legs over (0, oo)
with Lebesgue measure.  Both are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "WeightedSeq",
    "StepFunction",
    "as_seq",
    "decreasing_rearrangement",
    "sequence_as_step",
]


def _as_float_array(data, name: str) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    return arr


@dataclass(frozen=True)
class WeightedSeq:
    """A finite real vector; the element type of sequence couples."""

    values: np.ndarray

    def __post_init__(self):
        arr = _as_float_array(self.values, "values")
        if arr.size and not np.all(np.isfinite(arr)):
            raise ValueError("sequence entries must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @classmethod
    def of(cls, data) -> "WeightedSeq":
        if isinstance(data, WeightedSeq):
            return data
        return cls(np.asarray(data, dtype=float))

    @property
    def n(self) -> int:
        return self.values.size

    def __abs__(self) -> "WeightedSeq":
        return WeightedSeq(np.abs(self.values))

    def scaled(self, c: float) -> "WeightedSeq":
        return WeightedSeq(c * self.values)


def as_seq(x) -> np.ndarray:
    """Coerce a WeightedSeq or array-like to a plain 1-D float array."""
    if isinstance(x, WeightedSeq):
        return x.values
    return _as_float_array(x, "element")


@dataclass(frozen=True)
class StepFunction:
    """Left-continuous step function on (0, oo) with finitely many pieces.

    ``breaks`` holds m+1 ascending endpoints t_0 < t_1 < ... < t_m with
    t_0 >= 0, and ``values`` holds v_1..v_m; the function equals v_i on
    (t_{i-1}, t_i] and 0 outside.
    """

    breaks: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        br = _as_float_array(self.breaks, "breaks")
        vals = _as_float_array(self.values, "values")
        if br.size != vals.size + 1:
            raise ValueError("need len(breaks) == len(values) + 1")
        if br.size < 2:
            raise ValueError("a step function needs at least one piece")
        if br[0] < 0:
            raise ValueError("breakpoints must start at 0 or a positive value")
        if not np.all(np.diff(br) > 0):
            raise ValueError("breakpoints must be strictly increasing")
        if not (np.all(np.isfinite(br)) and np.all(np.isfinite(vals))):
            raise ValueError("breakpoints and values must be finite")
        br.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "breaks", br)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_pieces(cls, breaks, values) -> "StepFunction":
        return cls(np.asarray(breaks, dtype=float), np.asarray(values, dtype=float))

    @classmethod
    def indicator(cls, a: float, b: float, height: float = 1.0) -> "StepFunction":
        """height * chi_{(a, b]}."""
        if not 0 <= a < b:
            raise ValueError("need 0 <= a < b")
        return cls(np.array([a, b], dtype=float), np.array([height], dtype=float))

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.breaks)

    @property
    def support_measure(self) -> float:
        return float(self.widths[self.values != 0.0].sum())

    def __call__(self, t):
        """Evaluate at t > 0 (vectorized); 0 outside the pieces."""
        scalar = np.ndim(t) == 0
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        # piece i covers (breaks[i], breaks[i+1]]
        idx = np.searchsorted(self.breaks, t_arr, side="left") - 1
        inside = (idx >= 0) & (idx < self.values.size) & (t_arr > self.breaks[0])
        out = np.zeros_like(t_arr)
        safe = np.clip(idx, 0, self.values.size - 1)
        out[inside] = self.values[safe[inside]]
        return float(out[0]) if scalar else out

    def __abs__(self) -> "StepFunction":
        return StepFunction(self.breaks, np.abs(self.values))

    def scaled(self, c: float) -> "StepFunction":
        return StepFunction(self.breaks, c * self.values)

    def canonical(self) -> "StepFunction":
        """Merge adjacent equal values and strip zero pieces at both ends."""
        br = list(self.breaks)
        vals = list(self.values)
        # strip zero pieces at the ends
        while vals and vals[0] == 0.0:
            vals.pop(0)
            br.pop(0)
        while vals and vals[-1] == 0.0:
            vals.pop()
            br.pop()
        if not vals:
            return StepFunction(np.array([0.0, 1.0]), np.array([0.0]))
        out_br = [br[0]]
        out_vals = []
        for i, v in enumerate(vals):
            if out_vals and v == out_vals[-1]:
                out_br[-1] = br[i + 1]
            else:
                out_vals.append(v)
                out_br.append(br[i + 1])
        return StepFunction(np.array(out_br), np.array(out_vals))

    def merged_grid(self, other: "StepFunction") -> np.ndarray:
        return np.unique(np.concatenate([self.breaks, other.breaks]))

    def same_function(self, other: "StepFunction", tol: float = 0.0) -> bool:
        """Pointwise equality as functions (on the merged breakpoint grid)."""
        grid = self.merged_grid(other)
        mids = 0.5 * (grid[:-1] + grid[1:])
        probes = np.concatenate([mids, grid[1:]])
        return bool(np.all(np.abs(self(probes) - other(probes)) <= tol))

    def level_measure(self, level: float) -> float:
        """Lebesgue measure of { t : |f(t)| > level }."""
        mask = np.abs(self.values) > level
        return float(self.widths[mask].sum())

    def binary_pointwise(self, other: "StepFunction", fn) -> "StepFunction":
        """Apply fn(a, b) piecewise on the merged breakpoint grid."""
        grid = self.merged_grid(other)
        if grid[0] > 0.0:
            grid = np.concatenate([[0.0], grid])
        mids = 0.5 * (grid[:-1] + grid[1:])
        vals = fn(self(mids), other(mids))
        return StepFunction(grid, vals).canonical()


def decreasing_rearrangement(f: StepFunction) -> StepFunction:
    """Nonincreasing rearrangement f* of |f|, as a step function from 0.

    Equimeasurable with |f|: for every level c > 0 the measure of
    {|f| > c} equals the measure of {f* > c}.  Ties between equal values
    are kept in original piece order (stable sort), which fixes a
    deterministic representative without changing f* as a function.
    """
    vals = np.abs(f.values)
    widths = f.widths
    keep = vals > 0.0
    vals, widths = vals[keep], widths[keep]
    if vals.size == 0:
        return StepFunction(np.array([0.0, 1.0]), np.array([0.0]))
    order = np.argsort(-vals, kind="stable")
    vals, widths = vals[order], widths[order]
    breaks = np.concatenate([[0.0], np.cumsum(widths)])
    return StepFunction(breaks, vals).canonical()


def sequence_as_step(x) -> StepFunction:
    """Counting-measure picture of a sequence: x_k on the interval (k-1, k]."""
    arr = as_seq(x)
    if arr.size == 0:
        return StepFunction(np.array([0.0, 1.0]), np.array([0.0]))
    breaks = np.arange(arr.size + 1, dtype=float)
    return StepFunction(breaks, arr.copy())
