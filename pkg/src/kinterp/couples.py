"""Couple descriptors, space legs, and quasi-norm evaluation.

Supported couples:

* ``sequence_lp``   -- (l^p(w0), l^q(w1)) over finite index sets,
* ``function_lp``   -- (L^p, L^q) on (0, oo) with Lebesgue measure,
* ``weighted_l1``   -- (l^1(w0), l^1(w1)), weights in (0, oo]; an infinite
  weight forces the coordinate out of that leg,
* ``linfty_couple`` -- (L^oo, L^oo(1/t)) acting on step functions.

Exponents live in (0, oo]; oo is encoded as the string ``"inf"`` in JSON.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .elements import StepFunction, WeightedSeq, as_seq

__all__ = [
    "SpaceLeg",
    "CoupleDescriptor",
    "quasi_norm",
    "couple_to_json",
    "couple_from_json",
    "element_to_json",
    "element_from_json",
]

INF = math.inf


def _check_exponent(p, name="exponent"):
    if not (p > 0):
        raise ValueError(f"{name} must be positive (got {p})")


@dataclass(frozen=True)
class SpaceLeg:
    """One leg of a couple: a concrete quasi-normed lattice."""

    kind: str  # "seq" | "fun" | "linf_fun" | "linf_fun_over_t"
    exponent: float = INF
    weights: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("seq", "fun", "linf_fun", "linf_fun_over_t"):
            raise ValueError(f"unknown leg kind {self.kind!r}")
        if self.kind in ("seq", "fun"):
            _check_exponent(self.exponent)
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if np.any(w <= 0):
                raise ValueError("weights must be strictly positive")
            w.flags.writeable = False
            object.__setattr__(self, "weights", w)


def quasi_norm(x, leg: SpaceLeg) -> float:
    """Quasi-norm of an element in one leg.

    Returns +oo exactly when the element has mass the leg cannot carry:
    nonzero entries meeting an infinite weight, or (for the L^oo(1/t) leg)
    a nonzero piece touching t = 0.
    """
    if leg.kind == "seq":
        v = np.abs(as_seq(x))
        if leg.weights is not None:
            w = leg.weights
            if w.size != v.size:
                raise ValueError(
                    f"dimension mismatch: element has {v.size} entries, "
                    f"weights have {w.size}"
                )
            if np.any(np.isinf(w) & (v > 0)):
                return INF
            v = v * np.where(np.isinf(w), 0.0, w)
        p = leg.exponent
        if math.isinf(p):
            return float(v.max()) if v.size else 0.0
        return float((v**p).sum() ** (1.0 / p))
    if not isinstance(x, StepFunction):
        raise TypeError("function-space legs act on StepFunction elements")
    v = np.abs(x.values)
    if leg.kind == "fun":
        p = leg.exponent
        if math.isinf(p):
            return float(v.max()) if v.size else 0.0
        return float(((v**p) * x.widths).sum() ** (1.0 / p))
    if leg.kind == "linf_fun":
        return float(v.max()) if v.size else 0.0
    # linf_fun_over_t: sup |f(t)| / t, attained at the left end of each piece
    lefts = x.breaks[:-1]
    mask = v > 0
    if not np.any(mask):
        return 0.0
    if np.any(lefts[mask] == 0.0):
        return INF
    return float((v[mask] / lefts[mask]).max())


@dataclass(frozen=True)
class CoupleDescriptor:
    """Tagged description of a supported couple."""

    kind: str
    p: float = INF
    q: float = INF
    w0: np.ndarray | None = None
    w1: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("sequence_lp", "function_lp", "weighted_l1", "linfty_couple"):
            raise ValueError(f"unknown couple kind {self.kind!r}")
        if self.kind in ("sequence_lp", "function_lp"):
            _check_exponent(self.p, "p")
            _check_exponent(self.q, "q")
            if math.isfinite(self.p) and math.isfinite(self.q) and self.p > self.q:
                raise ValueError("normalization convention requires p <= q")
        for name in ("w0", "w1"):
            w = getattr(self, name)
            if w is None:
                continue
            w = np.asarray(w, dtype=float)
            if w.ndim != 1 or np.any(w <= 0) or np.any(np.isnan(w)):
                raise ValueError(f"{name} must be a strictly positive vector")
            if self.kind != "weighted_l1" and np.any(np.isinf(w)):
                raise ValueError("infinite weights are allowed only for weighted_l1")
            w.flags.writeable = False
            object.__setattr__(self, name, w)
        if (self.w0 is None) != (self.w1 is None):
            raise ValueError("provide both weights or neither")
        if self.w0 is not None and self.w0.size != self.w1.size:
            raise ValueError("w0 and w1 must have equal dimension")
        if self.kind == "weighted_l1":
            if self.w0 is None:
                raise ValueError("weighted_l1 requires w0 and w1")
            both_inf = np.isinf(self.w0) & np.isinf(self.w1)
            if np.any(both_inf):
                raise ValueError("a coordinate cannot have both weights infinite")

    # -- constructors ------------------------------------------------------

    @classmethod
    def sequence_lp(cls, p, q, w0=None, w1=None) -> "CoupleDescriptor":
        return cls("sequence_lp", float(p), float(q), w0, w1)

    @classmethod
    def function_lp(cls, p, q) -> "CoupleDescriptor":
        return cls("function_lp", float(p), float(q))

    @classmethod
    def weighted_l1(cls, w0, w1) -> "CoupleDescriptor":
        return cls("weighted_l1", 1.0, 1.0, w0, w1)

    @classmethod
    def linfty_couple(cls) -> "CoupleDescriptor":
        return cls("linfty_couple")

    # -- legs ---------------------------------------------------------------

    def legs(self) -> tuple[SpaceLeg, SpaceLeg]:
        if self.kind == "sequence_lp":
            return (
                SpaceLeg("seq", self.p, self.w0),
                SpaceLeg("seq", self.q, self.w1),
            )
        if self.kind == "weighted_l1":
            return (
                SpaceLeg("seq", 1.0, self.w0),
                SpaceLeg("seq", 1.0, self.w1),
            )
        if self.kind == "function_lp":
            return (SpaceLeg("fun", self.p), SpaceLeg("fun", self.q))
        return (SpaceLeg("linf_fun"), SpaceLeg("linf_fun_over_t"))

    def leg_norms(self, x) -> tuple[float, float]:
        leg0, leg1 = self.legs()
        return quasi_norm(x, leg0), quasi_norm(x, leg1)

    @property
    def is_sequence_couple(self) -> bool:
        return self.kind in ("sequence_lp", "weighted_l1")


# -- JSON encoding ----------------------------------------------------------


def _num_to_json(v: float):
    return "inf" if math.isinf(v) else v


def _num_from_json(v) -> float:
    if v == "inf":
        return INF
    return float(v)


def couple_to_json(c: CoupleDescriptor) -> dict:
    out: dict = {"kind": c.kind}
    if c.kind in ("sequence_lp", "function_lp"):
        out["p"] = _num_to_json(c.p)
        out["q"] = _num_to_json(c.q)
    if c.w0 is not None:
        out["w0"] = [_num_to_json(v) for v in c.w0]
        out["w1"] = [_num_to_json(v) for v in c.w1]
    return out


def couple_from_json(data: dict) -> CoupleDescriptor:
    kind = data.get("kind")
    w0 = data.get("w0")
    w1 = data.get("w1")
    if w0 is not None:
        w0 = np.array([_num_from_json(v) for v in w0])
        w1 = np.array([_num_from_json(v) for v in w1])
    if kind == "sequence_lp":
        return CoupleDescriptor.sequence_lp(
            _num_from_json(data["p"]), _num_from_json(data["q"]), w0, w1
        )
    if kind == "function_lp":
        return CoupleDescriptor.function_lp(
            _num_from_json(data["p"]), _num_from_json(data["q"])
        )
    if kind == "weighted_l1":
        return CoupleDescriptor.weighted_l1(w0, w1)
    if kind == "linfty_couple":
        return CoupleDescriptor.linfty_couple()
    raise ValueError(f"unknown couple kind {kind!r}")


def element_to_json(x) -> dict:
    if isinstance(x, StepFunction):
        return {"step": {"breaks": list(x.breaks), "values": list(x.values)}}
    return {"seq": list(as_seq(x))}


def element_from_json(data: dict):
    if "seq" in data:
        return WeightedSeq.of(data["seq"])
    if "step" in data:
        return StepFunction.from_pieces(data["step"]["breaks"], data["step"]["values"])
    raise ValueError("element JSON needs a 'seq' or 'step' key")
