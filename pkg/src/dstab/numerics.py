"""Dense linear-algebra kernels shared by the rest of the package.

Everything in here is a pure function of its arguments, so concurrent use
is safe.  Matrices are plain ``numpy.ndarray`` values in row-major order.
"""

from __future__ import annotations

import numpy as np


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite 2-D float array."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {m.shape}")
    if m.size and not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def kron(a, b) -> np.ndarray:
    """Kronecker product: block (i, j) of the result is ``a[i, j] * b``."""
    return np.kron(as_matrix(a), as_matrix(b))


def nullspace_basis(a, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis of the right null space of ``a``.

    Singular values below ``tol`` times the largest singular value count as
    zero, so the result has ``cols - numerical_rank`` columns and
    ``a @ N ~ 0``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = as_matrix(a)
    if m.shape[1] == 0:
        raise ValueError("matrix has no columns")
    _, s, vh = np.linalg.svd(m)
    if s.size == 0 or s[0] == 0.0:
        rank = 0
    else:
        rank = int(np.count_nonzero(s > tol * s[0]))
    return np.ascontiguousarray(vh[rank:].conj().T)


def symmetric_eigen(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a real symmetric matrix.

    Returns ``(w, v)`` with eigenvalues ``w`` ascending and orthonormal
    eigenvectors as the columns of ``v``.
    """
    m = as_matrix(h)
    if m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    scale = float(np.linalg.norm(m))
    if np.linalg.norm(m - m.T) > 1e-12 * max(scale, 1.0):
        raise ValueError("matrix must be symmetric")
    return np.linalg.eigh(m)


def poly_roots(coeffs) -> np.ndarray:
    """Roots of a real polynomial with ascending coefficients.

    Computed as eigenvalues of the companion matrix.  High-order
    coefficients that are negligible (<= 1e-12 times the largest magnitude)
    are trimmed first; a constant polynomial yields an empty root array and
    an all-zero one raises.
    """
    c = np.atleast_1d(np.asarray(coeffs, dtype=float))
    if c.ndim != 1 or c.size == 0:
        raise ValueError("coefficients must be a nonempty 1-D sequence")
    if not np.all(np.isfinite(c)):
        raise ValueError("coefficients must be finite")
    biggest = float(np.max(np.abs(c)))
    if biggest == 0.0:
        raise ValueError("zero polynomial: no leading coefficient after trimming")
    keep = c.size
    while keep > 1 and abs(c[keep - 1]) <= 1e-12 * biggest:
        keep -= 1
    if keep == 1:
        return np.zeros(0, dtype=complex)
    return np.roots(c[:keep][::-1]).astype(complex)


def interpolate_poly(nodes, values) -> np.ndarray:
    """Ascending real coefficients of the polynomial matching ``values`` at ``nodes``.

    The nodes must be pairwise distinct.  The target polynomial is assumed
    real: imaginary parts of the solved coefficients below ``1e-8 * scale``
    are discarded, larger ones raise.
    """
    x = np.atleast_1d(np.asarray(nodes, dtype=complex))
    y = np.atleast_1d(np.asarray(values, dtype=complex))
    if x.ndim != 1 or x.size == 0 or x.shape != y.shape:
        raise ValueError("nodes and values must be matching nonempty 1-D sequences")
    diffs = np.abs(x[:, None] - x[None, :])
    np.fill_diagonal(diffs, np.inf)
    if np.min(diffs) == 0.0:
        raise ValueError("interpolation nodes must be pairwise distinct")
    vander = np.vander(x, increasing=True)
    c = np.linalg.solve(vander, y)
    scale = max(1.0, float(np.max(np.abs(c))))
    if float(np.max(np.abs(c.imag))) > 1e-8 * scale:
        raise ValueError("interpolated coefficients have a non-negligible imaginary part")
    return np.ascontiguousarray(c.real)
