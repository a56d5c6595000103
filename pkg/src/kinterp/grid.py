"""Shared dyadic evaluation grid.

Every curve evaluation, parameter-norm quadrature and audit in this package
runs over a common multiplicative grid: points ``2**(n_min + j/per_octave)``
for ``j = 0 .. (n_max - n_min) * per_octave``.  Integrals against ``dt/t``
become midpoint sums in log scale with cell width ``ln 2 / per_octave``.

The default grid (2^-20 .. 2^20, 4 samples per octave) can be overridden with
the ``KDIV_GRID`` environment variable, formatted ``"n_min:n_max:per_octave"``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

__all__ = ["DyadicGrid", "default_grid", "GRID_ENV_VAR"]

GRID_ENV_VAR = "KDIV_GRID"


@dataclass(frozen=True)
class DyadicGrid:
    n_min: int = -20
    n_max: int = 20
    per_octave: int = 4

    def __post_init__(self):
        if self.n_min >= self.n_max:
            raise ValueError("grid needs n_min < n_max")
        if self.per_octave < 1:
            raise ValueError("per_octave must be a positive integer")

    @property
    def size(self) -> int:
        return (self.n_max - self.n_min) * self.per_octave + 1

    def points(self) -> np.ndarray:
        """Grid nodes t_j, ascending."""
        j = np.arange(self.size, dtype=float)
        return 2.0 ** (self.n_min + j / self.per_octave)

    @property
    def log_weight(self) -> float:
        """Quadrature weight of one node for integrals against dt/t."""
        return math.log(2.0) / self.per_octave

    def octaves(self) -> np.ndarray:
        """Integer dyadic exponents n_min..n_max covered by the grid."""
        return np.arange(self.n_min, self.n_max + 1)

    @classmethod
    def parse(cls, text: str) -> "DyadicGrid":
        """Parse ``"n_min:n_max:per_octave"`` (e.g. ``"-20:20:4"``)."""
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"bad grid spec {text!r}, expected 'a:b:c'")
        return cls(int(parts[0]), int(parts[1]), int(parts[2]))


def default_grid() -> DyadicGrid:
    """The package-wide default grid, honouring the KDIV_GRID variable."""
    spec = os.environ.get(GRID_ENV_VAR)
    if spec:
        return DyadicGrid.parse(spec)
    return DyadicGrid()
