"""K-method parameter lattices and the norms they induce.

A parameter is a quasi-normed function lattice E on (0, oo); the induced
norm of an element is ||K(., x)||_E.  Parameters here are weighted L^q
lattices against dt/t, discretized on the shared dyadic grid with midpoint
quadrature in log scale, plus finite intersections (norm = max of members).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .concave import ConcavePL, upper_concave_envelope
from .couples import CoupleDescriptor, SpaceLeg, quasi_norm
from .grid import DyadicGrid, default_grid
from .kfunctional import KCurve, k_curve
from .elements import WeightedSeq

__all__ = [
    "ParameterLattice",
    "parameter_norm",
    "k_space_norm",
    "lions_peetre_norm",
    "orbit_norm",
    "EHatNorm",
    "EHatCover",
    "e_hat_upper",
    "DIVERGENCE_LIMIT",
]

DIVERGENCE_LIMIT = 1e12  # partial sums past this flag "not in E" as +oo


@dataclass(frozen=True)
class ParameterLattice:
    """Weighted L^q(dt/t) on a dyadic grid, or an intersection of such.

    ``weight_exponent`` theta gives node weights t^-theta; ``node_weights``
    may instead list an explicit positive weight per grid node.
    """

    kind: str = "lq_dyadic"  # "lq_dyadic" | "intersection"
    q: float = 1.0
    weight_exponent: float = 0.0
    node_weights: np.ndarray | None = None
    grid: DyadicGrid = field(default_factory=default_grid)
    members: tuple = ()

    def __post_init__(self):
        if self.kind == "lq_dyadic":
            if not self.q > 0:
                raise ValueError("q must be positive")
            if self.node_weights is not None:
                w = np.asarray(self.node_weights, dtype=float)
                if w.size != self.grid.size or np.any(w <= 0):
                    raise ValueError("node weights must be positive, one per grid node")
                w.flags.writeable = False
                object.__setattr__(self, "node_weights", w)
        elif self.kind == "intersection":
            if not self.members:
                raise ValueError("intersection needs at least one member")
        else:
            raise ValueError(f"unknown parameter kind {self.kind!r}")

    @classmethod
    def lions_peetre(cls, theta: float, r: float, grid: DyadicGrid | None = None):
        """The classical parameter L^r(t^-theta, dt/t)."""
        if not 0 < theta < 1:
            raise ValueError("theta must lie in (0, 1)")
        if not r > 0:
            raise ValueError("r must be positive")
        return cls("lq_dyadic", float(r), float(theta), None, grid or default_grid())

    @classmethod
    def intersection(cls, *members: "ParameterLattice"):
        if not members:
            raise ValueError("intersection needs at least one member")
        return cls("intersection", members=tuple(members), grid=members[0].grid)

    def _weights_on_grid(self) -> np.ndarray:
        if self.node_weights is not None:
            return self.node_weights
        return self.grid.points() ** (-self.weight_exponent)

    def norm(self, f) -> float:
        """||f||_E for f a ConcavePL, a KCurve, or samples on the grid."""
        if self.kind == "intersection":
            return max(m.norm(f) for m in self.members)
        samples = _samples_on_grid(f, self.grid)
        if np.any(samples < 0):
            raise ValueError("parameter norms act on nonnegative curves")
        g = samples * self._weights_on_grid()
        if math.isinf(self.q):
            return float(g.max()) if g.size else 0.0
        powers = g**self.q
        total = 0.0
        for v in powers:  # running sum so divergence across the range is visible
            total += v * self.grid.log_weight
            if total > DIVERGENCE_LIMIT:
                return math.inf
        return float(total ** (1.0 / self.q))

    def to_json(self) -> dict:
        if self.kind == "intersection":
            return {"kind": "intersection", "members": [m.to_json() for m in self.members]}
        out = {
            "kind": "lq_dyadic",
            "q": "inf" if math.isinf(self.q) else self.q,
            "theta": self.weight_exponent,
            "grid": {
                "n_min": self.grid.n_min,
                "n_max": self.grid.n_max,
                "per_octave": self.grid.per_octave,
            },
        }
        if self.node_weights is not None:
            out["node_weights"] = list(self.node_weights)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ParameterLattice":
        if data["kind"] == "intersection":
            return cls.intersection(*(cls.from_json(m) for m in data["members"]))
        g = data.get("grid")
        grid = (
            DyadicGrid(g["n_min"], g["n_max"], g["per_octave"]) if g else default_grid()
        )
        q = math.inf if data["q"] == "inf" else float(data["q"])
        nw = data.get("node_weights")
        return cls(
            "lq_dyadic",
            q,
            float(data.get("theta", 0.0)),
            None if nw is None else np.asarray(nw, dtype=float),
            grid,
        )


def _samples_on_grid(f, grid: DyadicGrid) -> np.ndarray:
    if isinstance(f, KCurve):
        return f.at(grid.points())
    if isinstance(f, ConcavePL):
        return f.at(grid.points())
    arr = np.asarray(f, dtype=float)
    if arr.shape != (grid.size,):
        raise ValueError(
            f"expected a curve object or {grid.size} samples on the parameter grid"
        )
    return arr


def parameter_norm(f, E: ParameterLattice) -> float:
    """||f||_E by midpoint quadrature in log scale; +oo when divergent."""
    return E.norm(f)


def k_space_norm(
    x, couple: CoupleDescriptor, E: ParameterLattice, accuracy: float = 1e-8
) -> float:
    """Norm of x in the K-space with parameter E: ||K(., x)||_E.

    Returns +oo (the divergence flag) when the quadrature blows past
    DIVERGENCE_LIMIT, the numeric proxy for K(., x) not lying in E.
    """
    curve = k_curve(x, couple, grid=_finest_grid(E), accuracy=accuracy)
    return E.norm(curve)


def _finest_grid(E: ParameterLattice) -> DyadicGrid:
    if E.kind == "lq_dyadic":
        return E.grid
    return max((m.grid for m in E.members), key=lambda g: g.size)


def lions_peetre_norm(
    x,
    couple: CoupleDescriptor,
    theta: float,
    r: float,
    grid: DyadicGrid | None = None,
    accuracy: float = 1e-8,
) -> float:
    """Direct quadrature of ( int (K(t,x) t^-theta)^r dt/t )^{1/r}.

    Kept as an independent code path from ``k_space_norm`` with the
    Lions-Peetre parameter; the two must agree to quadrature precision.
    """
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    if not r > 0:
        raise ValueError("r must be positive")
    grid = grid or default_grid()
    ts = grid.points()
    kvals = k_curve(x, couple, grid=grid, accuracy=accuracy).at(ts)
    integrand = kvals * ts ** (-theta)
    if math.isinf(r):
        return float(integrand.max())
    return float(((integrand**r).sum() * grid.log_weight) ** (1.0 / r))


# ---------------------------------------------------------------------------
# orbit norms
# ---------------------------------------------------------------------------


def orbit_norm(curve_y: KCurve | ConcavePL, curve_x: KCurve | ConcavePL) -> float:
    """sup_t K(t, y) / K(t, x), exact for piecewise-linear curves.

    On any interval where both curves are affine the ratio is monotone, so
    the supremum sits at a knot of either curve or at one of the two ends
    (t -> 0+ and t -> oo), which are handled through jump values and
    terminal slopes.
    """
    cy = curve_y.curve if isinstance(curve_y, KCurve) else curve_y
    cx = curve_x.curve if isinstance(curve_x, KCurve) else curve_x
    if cx.last_value == 0.0 and cx.terminal_slope == 0.0:
        raise ValueError("orbit norm needs a nonzero denominator element")
    if cy.last_value == 0.0 and cy.terminal_slope == 0.0:
        return 0.0

    best = 0.0
    knots = np.unique(np.concatenate([cy.knots_t, cx.knots_t]))
    knots = knots[knots > 0]
    if knots.size:
        num = cy.at(knots)
        den = cx.at(knots)
        if np.any((den == 0) & (num > 0)):
            return math.inf
        mask = den > 0
        if np.any(mask):
            best = float((num[mask] / den[mask]).max())

    # t -> 0+: jumps dominate, else initial slopes
    ay, ax = cy.value_at_zero_plus, cx.value_at_zero_plus
    if ay > 0 or ax > 0:
        if ax == 0:
            return math.inf
        best = max(best, ay / ax)
    else:
        sy, sx = cy.initial_slope(), cx.initial_slope()
        if sy > 0:
            if sx == 0:
                return math.inf
            if math.isfinite(sy) and math.isfinite(sx):
                best = max(best, sy / sx)

    # t -> oo: terminal slopes, else final plateau values
    by, bx = cy.terminal_slope, cx.terminal_slope
    if by > 0 or bx > 0:
        if bx == 0:
            return math.inf
        best = max(best, by / bx)
    return best


# ---------------------------------------------------------------------------
# the orbit-parameter upper bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EHatNorm:
    """Configuration for the orbit-parameter upper bound.

    ``base_norm`` measures candidate elements (the space X whose K-orbits
    generate the parameter); covers are built inside ``couple``.  The
    reported value is an upper bound on the true infimum over infinite
    covers, which is not computable.
    """

    couple: CoupleDescriptor
    base_leg: SpaceLeg
    p: float
    q: float
    budget: int = 64
    grid: DyadicGrid = field(default_factory=default_grid)

    def __post_init__(self):
        if not (0 < self.q <= self.p <= 1):
            raise ValueError("need 0 < q <= p <= 1")
        if self.budget < 1:
            raise ValueError("cover search budget must be positive")
        if not self.couple.is_sequence_couple or self.couple.w0 is not None:
            raise ValueError(
                "cover dictionary uses variable-dimension candidates; "
                "only unweighted sequence couples are supported"
            )


@dataclass(frozen=True)
class EHatCover:
    """A finite cover witnessing an upper bound for the orbit parameter."""

    value: float
    elements: tuple
    coefficients: np.ndarray
    scales: np.ndarray

    def k_power_sum(self, cfg: EHatNorm) -> np.ndarray:
        """( sum_i K(t, x_i)^p )^{1/p} on the grid, for audit."""
        ts = cfg.grid.points()
        total = np.zeros_like(ts)
        for el in self.elements:
            total += k_curve(el, cfg.couple).at(ts) ** cfg.p
        return total ** (1.0 / cfg.p)


def _atom_dictionary(cfg: EHatNorm, scale: float):
    """Candidate elements whose K-curve dominates min(1, t/scale) cheaply.

    Uses scaled basis spikes and flat level-truncations, the natural
    single-scale shapes of the supported couples.
    """
    dim_cap = max(2, cfg.budget)
    candidates = []
    # spike: one coordinate
    candidates.append(np.array([1.0]))
    # flat vectors of dyadic lengths up to the budget
    m = 2
    while m <= dim_cap:
        candidates.append(np.ones(m) / m)
        m *= 2
    if scale > 1:
        m = int(math.ceil(scale))
        if m <= 4 * dim_cap:
            candidates.append(np.ones(m) / m)
    return candidates


def _atom_unit_cost(cfg: EHatNorm, scale: float):
    """Cheapest dictionary element u with K(t, u) >= min(1, t/scale) on grid."""
    ts = cfg.grid.points()
    target = np.minimum(1.0, ts / scale)
    best_cost, best_el = math.inf, None
    for cand in _atom_dictionary(cfg, scale):
        kvals = k_curve(cand, cfg.couple).at(ts)
        mask = kvals > 0
        if not np.all(mask | (target == 0)):
            continue
        lam = float((target[mask] / kvals[mask]).max()) if np.any(mask) else math.inf
        if lam == 0 or not math.isfinite(lam):
            continue
        cost = lam * quasi_norm(cand, cfg.base_leg)
        if cost < best_cost:
            best_cost, best_el = cost, cand * lam
    if best_el is None:
        raise ValueError("empty dictionary: no candidate covers the atom shape")
    return best_cost, best_el


def e_hat_upper(f, cfg: EHatNorm) -> EHatCover:
    """Upper bound on the orbit-parameter norm of a nonnegative curve.

    Builds the canonical piecewise-ramp cover: the grid samples of f (their
    concave envelope, when the samples are not already in concave position)
    decompose exactly into ramps min(1, t/t_j) with coefficients
    c_j = t_j (d_j - d_{j+1}), d_j the chord slopes; each ramp is covered by
    the cheapest scaled dictionary element.  Coverage of f on the grid
    follows from sum K >= f and p <= 1; the reported q-cost

        value = ( sum_j (c_j w_j)^q )^{1/q}

    is an upper bound by construction.  For concave inputs the coefficient
    map is linear in f, which makes the bound q-subadditive:
    value(f+g)^q <= value(f)^q + value(g)^q.
    """
    ts = cfg.grid.points()
    samples = _samples_on_grid(f, cfg.grid)
    if np.any(samples < 0):
        raise ValueError("curve must be nonnegative")
    if not np.any(samples > 0):
        return EHatCover(0.0, (), np.zeros(0), np.zeros(0))
    env = upper_concave_envelope(ts, samples)
    heights = env.at(ts)
    # chord slopes of the envelope through (0,0) and the grid nodes
    t_ext = np.concatenate([[0.0], ts])
    y_ext = np.concatenate([[0.0], heights])
    d = np.diff(y_ext) / np.diff(t_ext)
    d_next = np.concatenate([d[1:], [0.0]])
    coeffs = ts * np.maximum(d - d_next, 0.0)
    active = coeffs > 0.0
    scales = ts[active]
    coeffs = coeffs[active]
    elements = []
    costs = np.empty(coeffs.size)
    for i, s in enumerate(scales):
        w, unit = _atom_unit_cost(cfg, s)
        costs[i] = w
        elements.append(WeightedSeq(unit * coeffs[i]))
    value = float(((coeffs * costs) ** cfg.q).sum() ** (1.0 / cfg.q))
    return EHatCover(value, tuple(elements), coeffs, scales)
