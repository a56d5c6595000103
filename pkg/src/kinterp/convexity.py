"""Convexification algebra and one-sided convexity probes.

The p-convexification of a concrete lattice keeps the elements and re-reads
the algebra: x (+) y = (x^{1/p} + y^{1/p})^p, a (.) x = a^p x, with norm
||x||^{1/p}.  For l^r legs this is the function-space identification
(l^r)^{(p)} = l^{rp} (weights transform as w -> w^{1/p}).

The convexity probes are one-sided by design: the true constants are
suprema over infinite families, so the probes only report the best value
achieved by a finite search family, never an upper certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .couples import CoupleDescriptor, SpaceLeg, quasi_norm
from .elements import StepFunction, WeightedSeq, as_seq

__all__ = [
    "signed_power",
    "oplus",
    "odot",
    "ConvexifiedElement",
    "convexify_element",
    "convexify_leg",
    "convexify_couple",
    "ConvexityEstimate",
    "pq_convexity_probe",
    "l_convexity_probe",
]


def signed_power(x, e: float):
    """Sign-preserving power |x|^e sign(x), pointwise."""
    if isinstance(x, StepFunction):
        return StepFunction(x.breaks, signed_power(x.values, e))
    if isinstance(x, WeightedSeq):
        return WeightedSeq(signed_power(x.values, e))
    arr = np.asarray(x, dtype=float)
    return np.sign(arr) * np.abs(arr) ** e


def oplus(x, y, p: float):
    """The p-convexified sum (x^{1/p} + y^{1/p})^p, pointwise."""
    if p <= 0:
        raise ValueError("p must be positive")
    if isinstance(x, StepFunction) and isinstance(y, StepFunction):
        return x.binary_pointwise(
            y, lambda a, b: signed_power(signed_power(a, 1 / p) + signed_power(b, 1 / p), p)
        )
    a, b = as_seq(x), as_seq(y)
    out = signed_power(signed_power(a, 1.0 / p) + signed_power(b, 1.0 / p), p)
    return WeightedSeq(out) if isinstance(x, WeightedSeq) else out


def odot(alpha: float, x, p: float):
    """The p-convexified scalar action: alpha (.) x = |alpha|^p sign(alpha) x."""
    if p <= 0:
        raise ValueError("p must be positive")
    c = math.copysign(abs(alpha) ** p, alpha)
    if isinstance(x, StepFunction):
        return x.scaled(c)
    if isinstance(x, WeightedSeq):
        return x.scaled(c)
    return c * np.asarray(x, dtype=float)


@dataclass(frozen=True)
class ConvexifiedElement:
    """An element viewed in X^(p): same element, norm ||x||_X^{1/p}."""

    element: object
    p: float
    norm: float

    def oplus(self, other, p=None):
        return oplus(self.element, other, p if p is not None else self.p)

    def odot(self, alpha, p=None):
        return odot(alpha, self.element, p if p is not None else self.p)


def convexify_element(x, p: float, space: SpaceLeg) -> ConvexifiedElement:
    """View x inside the p-convexification of a leg."""
    if p <= 0:
        raise ValueError("p must be positive")
    return ConvexifiedElement(x, p, quasi_norm(x, space) ** (1.0 / p))


def convexify_leg(leg: SpaceLeg, p: float) -> SpaceLeg:
    """Concrete leg of the p-convexification: l^r(w) -> l^{rp}(w^{1/p}).

    Under the identification f <-> f^{1/p}, the convexified norm of f is
    (sum (|f_k| w_k^{1/p})^{rp})^{1/(rp)}; an element x of the original leg
    is represented by signed_power(x, p).
    """
    if p <= 0:
        raise ValueError("p must be positive")
    if leg.kind not in ("seq", "fun"):
        raise ValueError("only l^r / L^r legs support concrete convexification")
    new_exp = leg.exponent * p if math.isfinite(leg.exponent) else math.inf
    w = None if leg.weights is None else leg.weights ** (1.0 / p)
    return SpaceLeg(leg.kind, new_exp, w)


def convexify_couple(couple: CoupleDescriptor, p: float) -> CoupleDescriptor:
    """Leg-wise p-convexification of a sequence couple.

    Elements map via x -> signed_power(x, p); K-functionals of image and
    original agree within the factor 2^|1-p| band after the substitution
    t -> t^{1/p} (measured, not assumed, by the tests).
    """
    if couple.kind not in ("sequence_lp", "weighted_l1"):
        raise ValueError("concrete convexification is implemented for sequence couples")
    leg0, leg1 = couple.legs()
    new0, new1 = convexify_leg(leg0, p), convexify_leg(leg1, p)
    pa = new0.exponent if math.isfinite(new0.exponent) else math.inf
    qa = new1.exponent if math.isfinite(new1.exponent) else math.inf
    if math.isfinite(pa) and math.isfinite(qa) and pa > qa:
        raise ValueError("convexified exponents leave the supported p <= q range")
    if pa == 1.0 and qa == 1.0 and new0.weights is not None:
        return CoupleDescriptor.weighted_l1(new0.weights, new1.weights)
    return CoupleDescriptor.sequence_lp(pa, qa, new0.weights, new1.weights)


# ---------------------------------------------------------------------------
# probes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvexityEstimate:
    """One-sided probe result: a bound achieved by a concrete witness family.

    For the (p,q)-convexity probe the bound is a lower estimate of the
    minimal constant; for the L-convexity probe it is an upper estimate of
    the admissible epsilon.  Neither direction is certified.
    """

    bound: float
    witness: tuple
    budget: int


def _pq_ratio(family: np.ndarray, leg: SpaceLeg, p: float, q: float) -> float:
    """|| (sum |x_k|^p)^{1/p} ||_X  /  (sum ||x_k||_X^q)^{1/q} for a family."""
    if math.isinf(p):
        combined = np.abs(family).max(axis=0)
    else:
        combined = (np.abs(family) ** p).sum(axis=0) ** (1.0 / p)
    num = quasi_norm(combined, leg)
    norms = np.array([quasi_norm(row, leg) for row in family])
    if math.isinf(q):
        den = norms.max()
    else:
        den = (norms**q).sum() ** (1.0 / q)
    if den == 0:
        return 0.0
    return num / den


def pq_convexity_probe(
    leg: SpaceLeg, p: float, q: float, budget: int, dim: int = 8, rng=None
) -> ConvexityEstimate:
    """Lower bound on the (p,q)-convexity constant of a sequence leg.

    Evaluates structured families (disjoint supports, equal copies,
    spike+flat mixes) and random families, and keeps the best ratio; the
    true constant is at least the reported bound.
    """
    if not (p > 0 and q > 0):
        raise ValueError("exponents must be positive")
    if q > p:
        raise ValueError("probe expects q <= p")
    if budget < 1:
        raise ValueError("budget must be positive")
    if leg.kind != "seq":
        raise ValueError("probe works on sequence legs")
    rng = np.random.default_rng(rng)
    best, best_family = 0.0, None

    def consider(family):
        nonlocal best, best_family
        family = np.atleast_2d(np.asarray(family, dtype=float))
        r = _pq_ratio(family, leg, p, q)
        if r > best:
            best, best_family = r, family

    for m in range(1, dim + 1):
        consider(np.eye(m, dim))  # disjoint spikes
        consider(np.ones((m, dim)))  # equal copies
        spike = np.zeros(dim)
        spike[0] = 1.0
        flat = np.ones(dim) / dim
        consider(np.stack([spike] + [flat] * (m - 1)))
    for _ in range(budget):
        m = int(rng.integers(1, dim + 1))
        fam = rng.random((m, dim)) * (rng.random((m, dim)) < 0.5)
        if np.any(fam):
            consider(fam)
    return ConvexityEstimate(float(best), tuple(map(tuple, best_family)), budget)


def l_convexity_probe(leg: SpaceLeg, budget: int, dim: int = 8, rng=None) -> ConvexityEstimate:
    """Upper bound on the admissible L-convexity epsilon of a sequence leg.

    Searches families 0 <= x_i <= x, ||x|| = 1 and scores each by
    max(delta, max_i ||x_i||) where delta is the tightest level with
    avg(x_i) >= (1 - delta) x.  Any admissible epsilon satisfies
    epsilon <= score for every family, so the minimum score over the
    search is a one-sided upper estimate.
    """
    if budget < 1:
        raise ValueError("budget must be positive")
    if leg.kind != "seq":
        raise ValueError("probe works on sequence legs")
    rng = np.random.default_rng(rng)
    best, best_family = math.inf, None

    def consider(x, parts):
        nonlocal best, best_family
        parts = np.atleast_2d(parts)
        avg = parts.mean(axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(x > 0, avg / x, 1.0)
        delta = float(np.clip(1.0 - ratio.min(), 0.0, 1.0))
        m = max(quasi_norm(row, leg) for row in parts)
        score = max(delta, m)
        if score < best:
            best, best_family = score, (x.copy(), parts.copy())

    # partition slices of a uniform vector, the closed-form family
    for m in sorted({min(2, dim), min(4, dim), dim}):
        x = np.ones(dim)
        x = x / quasi_norm(x, leg)
        bounds = np.linspace(0, dim, m + 1).astype(int)
        parts = np.zeros((m, dim))
        for i in range(m):
            parts[i, bounds[i] : bounds[i + 1]] = x[bounds[i] : bounds[i + 1]]
        consider(x, parts)
    for _ in range(budget):
        x = np.abs(rng.random(dim)) + 1e-3
        x = x / quasi_norm(x, leg)
        m = int(rng.integers(1, dim + 1))
        parts = rng.random((m, dim)) * x[None, :]
        consider(x, parts)
    return ConvexityEstimate(float(best), best_family, budget)
