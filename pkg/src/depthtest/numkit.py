"""Small numerical primitives: Cholesky, SPD solves, medians and the chi-square(1) law.

Matrices and vectors are plain ``numpy`` float arrays.  Everything here is a
pure function of its inputs.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionMismatch, DomainError, EmptyInput, NotPositiveDefinite

PIVOT_RTOL = 1e-12


def _as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix has non-finite entries")
    return a


def cholesky(a) -> np.ndarray:
    """Lower-triangular ``L`` with ``L @ L.T == a``.

    Raises
    ------
    NotPositiveDefinite
        If a pivot falls to ``1e-12`` times the largest diagonal entry or below.
    """
    a = _as_matrix(a)
    d = a.shape[0]
    if not np.allclose(a, a.T, rtol=1e-12, atol=0.0):
        raise DomainError("matrix is not symmetric")
    scale = float(np.max(np.diag(a))) if d else 0.0
    tol = PIVOT_RTOL * scale
    L = np.zeros_like(a)
    for j in range(d):
        pivot = a[j, j] - L[j, :j] @ L[j, :j]
        if not pivot > tol:
            raise NotPositiveDefinite(f"pivot {j} is {pivot:.3g} (tolerance {tol:.3g})")
        L[j, j] = math.sqrt(pivot)
        for i in range(j + 1, d):
            L[i, j] = (a[i, j] - L[i, :j] @ L[j, :j]) / L[j, j]
    return L


def forward_substitute(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``L z = b`` for lower-triangular ``L``.

    ``b`` may be a vector or an ``(k, d)`` stack of right-hand sides stored as
    rows.  Accumulation is an explicit loop over coordinates, so each row's
    result does not depend on how many rows are solved together.
    """
    b = np.asarray(b, dtype=float)
    rows = b if b.ndim == 2 else b[None, :]
    d = L.shape[0]
    if rows.shape[1] != d:
        raise DimensionMismatch(f"right-hand side has dimension {rows.shape[1]}, expected {d}")
    z = np.empty_like(rows)
    for i in range(d):
        acc = rows[:, i].copy()
        for k in range(i):
            acc -= L[i, k] * z[:, k]
        z[:, i] = acc / L[i, i]
    return z if b.ndim == 2 else z[0]


def back_substitute(U: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve ``U z = b`` for upper-triangular ``U`` (vector ``b``)."""
    b = np.asarray(b, dtype=float)
    d = U.shape[0]
    z = np.empty(d)
    for i in range(d - 1, -1, -1):
        z[i] = (b[i] - U[i, i + 1:] @ z[i + 1:]) / U[i, i]
    return z


def solve_spd(a, b) -> np.ndarray:
    """Solve ``a z = b`` for symmetric positive definite ``a`` via Cholesky."""
    L = cholesky(a)
    b = np.asarray(b, dtype=float)
    if b.shape != (L.shape[0],):
        raise DimensionMismatch(f"b has shape {b.shape}, expected ({L.shape[0]},)")
    return back_substitute(L.T, forward_substitute(L, b))


def median(xs) -> float:
    """Median; even-length inputs give the midpoint of the two central values."""
    xs = np.asarray(xs, dtype=float).ravel()
    if xs.size == 0:
        raise EmptyInput("median of an empty sequence")
    return float(np.median(xs))


def mad(xs) -> float:
    """Median absolute deviation from the median (unscaled)."""
    xs = np.asarray(xs, dtype=float).ravel()
    return median(np.abs(xs - median(xs)))


def sym2_eigh(a) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a symmetric 2x2 matrix in closed form.

    Returns ascending eigenvalues and the matching unit eigenvectors as columns.
    """
    a = _as_matrix(a)
    if a.shape != (2, 2):
        raise DimensionMismatch("sym2_eigh needs a 2x2 matrix")
    p, q, r = a[0, 0], a[0, 1], a[1, 1]
    mid = 0.5 * (p + r)
    rad = math.hypot(0.5 * (p - r), q)
    vals = np.array([mid - rad, mid + rad])
    # principal-axis angle of the larger eigenvalue
    phi = 0.5 * math.atan2(2.0 * q, p - r)
    big = np.array([math.cos(phi), math.sin(phi)])
    small = np.array([-big[1], big[0]])
    return vals, np.column_stack([small, big])


def chi2_1_sf(x: float) -> float:
    """Survival function of the chi-square law with one degree of freedom."""
    x = float(x)
    if not math.isfinite(x) or x < 0:
        raise DomainError(f"chi2_1_sf needs a finite x >= 0, got {x}")
    return math.erfc(math.sqrt(0.5 * x))


def chi2_1_cdf(x: float) -> float:
    x = float(x)
    if not math.isfinite(x) or x < 0:
        raise DomainError(f"chi2_1_cdf needs a finite x >= 0, got {x}")
    return math.erf(math.sqrt(0.5 * x))


def chi2_1_quantile(p: float, xtol: float = 1e-12) -> float:
    """Inverse CDF of chi-square(1) by bisection, to relative tolerance ``xtol``."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"chi2_1_quantile needs 0 < p < 1, got {p}")
    lo, hi = 0.0, 1.0
    while chi2_1_cdf(hi) < p:
        lo, hi = hi, 2.0 * hi
    while hi - lo > xtol * hi and hi > 1e-300:
        mid = 0.5 * (lo + hi)
        if chi2_1_cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
