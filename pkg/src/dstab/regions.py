"""Root-location regions defined by a 2x2 real symmetric matrix.

A point s belongs to the region when [1 s]* B [1 s] < 0; the region is open
by that strict inequality.  Only real symmetric B is supported; no convexity
validation is attempted for custom matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics


@dataclass(frozen=True)
class LmiRegion:
    b: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        b = numerics.as_matrix(self.b)
        if b.shape != (2, 2):
            raise ValueError("region matrix must be 2x2")
        if not np.array_equal(b, b.T):
            raise ValueError("region matrix must be symmetric")
        if np.all(b == 0.0):
            raise ValueError("region matrix must not be zero")
        object.__setattr__(self, "b", b)

    def value(self, s0: complex) -> float:
        """Membership value: negative inside, zero on the boundary."""
        s0 = complex(s0)
        return float(self.b[0, 0] + 2.0 * s0.real * self.b[0, 1] + abs(s0) ** 2 * self.b[1, 1])

    def contains(self, s0: complex) -> bool:
        return self.value(s0) < 0.0

    @property
    def stability_word(self) -> str:
        """Verdict wording: Hurwitz for the left half plane, Schur for the unit disk."""
        return {"lhp": "Hurwitz", "disk": "Schur"}.get(self.name, "D")


def region_lhp() -> LmiRegion:
    """Open left half plane: value is 2*Re(s)."""
    return LmiRegion(np.array([[0.0, 1.0], [1.0, 0.0]]), name="lhp")


def region_unit_disk() -> LmiRegion:
    """Open unit disk: value is |s|^2 - 1."""
    return LmiRegion(np.array([[-1.0, 0.0], [0.0, 1.0]]), name="disk")


def region_value(region: LmiRegion, s0: complex) -> float:
    return region.value(s0)
