"""Polynomial matrices stored as degree-indexed real coefficient blocks.

A degree-``l`` polynomial matrix is the list of ``l + 1`` square blocks
``A_0, ..., A_l`` of its powers of ``s``.  The stored degree is part of the
value: zero high-order blocks are legal, which lets family members share a
uniform degree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics

#: guard on the evaluation-interpolation determinant (number of nodes).
MAX_DET_NODES = 512


@dataclass(frozen=True)
class Polynomial:
    """Real scalar polynomial; ``coeffs[k]`` multiplies ``s**k``."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise ValueError("polynomial needs at least one coefficient")
        if not all(np.isfinite(c) for c in self.coeffs):
            raise ValueError("polynomial coefficients must be finite")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def padded(self, degree: int) -> "Polynomial":
        if degree < self.degree:
            raise ValueError("cannot pad to a lower degree")
        return Polynomial(self.coeffs + (0.0,) * (degree - self.degree))

    def __call__(self, s0: complex) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * s0 + c
        return acc

    def roots(self) -> np.ndarray:
        return numerics.poly_roots(self.coeffs)


class PolynomialMatrix:
    """Square matrix polynomial ``A_0 + A_1 s + ... + A_l s^l``."""

    __slots__ = ("blocks",)

    def __init__(self, blocks):
        arr = np.asarray(blocks, dtype=float)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise ValueError("blocks must be a (l+1, n, n) array of square matrices")
        if arr.shape[0] < 1:
            raise ValueError("need at least the degree-0 block")
        if not np.all(np.isfinite(arr)):
            raise ValueError("block entries must be finite")
        self.blocks = arr

    @classmethod
    def from_entries(cls, entries) -> "PolynomialMatrix":
        """Build from an n x n nest of :class:`Polynomial` entries."""
        n = len(entries)
        if any(len(row) != n for row in entries):
            raise ValueError("entry grid must be square")
        degree = max(p.degree for row in entries for p in row)
        blocks = np.zeros((degree + 1, n, n))
        for i, row in enumerate(entries):
            for j, p in enumerate(row):
                blocks[: p.degree + 1, i, j] = p.coeffs
        return cls(blocks)

    @property
    def n(self) -> int:
        return self.blocks.shape[1]

    @property
    def degree(self) -> int:
        return self.blocks.shape[0] - 1

    def entry(self, i: int, j: int) -> Polynomial:
        return Polynomial(tuple(self.blocks[:, i, j]))

    def padded(self, degree: int) -> "PolynomialMatrix":
        if degree < self.degree:
            raise ValueError("cannot pad to a lower degree")
        if degree == self.degree:
            return self
        extra = np.zeros((degree - self.degree, self.n, self.n))
        return PolynomialMatrix(np.concatenate([self.blocks, extra], axis=0))

    def eval_at(self, s0: complex) -> np.ndarray:
        """Horner evaluation; returns a complex n x n matrix."""
        acc = np.array(self.blocks[-1], dtype=complex)
        for k in range(self.degree - 1, -1, -1):
            acc = acc * s0 + self.blocks[k]
        return acc

    def coefficient_matrix(self) -> "CoefficientMatrix":
        return CoefficientMatrix.from_polynomial_matrix(self)

    def det_poly(self) -> Polynomial:
        """Determinant polynomial via evaluation at scaled roots of unity.

        Degree <= n*l, so n*l + 1 nodes pin it down.  The node radius is the
        degree-th root of 1 + the largest block row sum: taking the root
        keeps the value spread across nodes near the coefficient spread, so
        the Vandermonde solve stays conditioned even for large entries.
        Near-zero leading coefficients are trimmed.
        """
        num_nodes = self.n * self.degree + 1
        if num_nodes > MAX_DET_NODES:
            raise ValueError(f"determinant degree guard exceeded ({num_nodes} > {MAX_DET_NODES} nodes)")
        row_sum = 1.0 + max(float(np.max(np.sum(np.abs(b), axis=1))) for b in self.blocks)
        radius = max(1.0, row_sum ** (1.0 / num_nodes))
        nodes = radius * np.exp(2j * np.pi * np.arange(num_nodes) / num_nodes)
        acc = np.repeat(self.blocks[-1][None].astype(complex), num_nodes, axis=0)
        for k in range(self.degree - 1, -1, -1):
            acc = acc * nodes[:, None, None] + self.blocks[k]
        values = np.linalg.det(acc)
        coeffs = numerics.interpolate_poly(nodes, values)
        biggest = float(np.max(np.abs(coeffs)))
        keep = len(coeffs)
        if biggest > 0.0:
            while keep > 1 and abs(coeffs[keep - 1]) < 1e-9 * biggest:
                keep -= 1
        else:
            keep = 1
        return Polynomial(tuple(coeffs[:keep]))

    def __eq__(self, other) -> bool:
        return isinstance(other, PolynomialMatrix) and self.blocks.shape == other.blocks.shape and bool(
            np.array_equal(self.blocks, other.blocks)
        )

    def __repr__(self) -> str:
        return f"PolynomialMatrix(n={self.n}, degree={self.degree})"


@dataclass(frozen=True)
class CoefficientMatrix:
    """Horizontal concatenation ``(A_0, ..., A_l)``, an n x (l+1)n matrix."""

    n: int
    l: int
    data: np.ndarray

    @classmethod
    def from_polynomial_matrix(cls, p: PolynomialMatrix) -> "CoefficientMatrix":
        data = np.hstack([p.blocks[k] for k in range(p.degree + 1)])
        return cls(n=p.n, l=p.degree, data=data)

    def __post_init__(self):
        if self.data.shape != (self.n, (self.l + 1) * self.n):
            raise ValueError("coefficient matrix must be n x (l+1)n")

    def to_polynomial_matrix(self) -> PolynomialMatrix:
        blocks = [self.data[:, k * self.n : (k + 1) * self.n] for k in range(self.l + 1)]
        return PolynomialMatrix(np.array(blocks))


def scale_add(weighted: list[tuple[float, PolynomialMatrix]]) -> PolynomialMatrix:
    """Blockwise weighted sum; summands are zero-padded to a common degree."""
    if not weighted:
        raise ValueError("need at least one summand")
    n = weighted[0][1].n
    if any(p.n != n for _, p in weighted):
        raise ValueError("summands must share the matrix dimension")
    degree = max(p.degree for _, p in weighted)
    acc = np.zeros((degree + 1, n, n))
    for w, p in weighted:
        acc += float(w) * p.padded(degree).blocks
    return PolynomialMatrix(acc)
