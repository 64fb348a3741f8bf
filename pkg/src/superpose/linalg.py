"""Small dense complex linear algebra.

Everything here works on plain ``numpy`` arrays of dtype ``complex128``
(the "complex matrix" carrier of the package).  The eigensolver and the
singular value routine are self-contained Jacobi iterations; ``numpy.linalg``
is only used by the test-suite as an independent oracle.

Conventions
-----------
* Eigenvalues are returned in **ascending** order, ``lam[0] <= ... <= lam[-1]``,
  so ``lam[-1]`` is the largest eigenvalue.
* Singular values are returned in **descending** order.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import (
    NoConvergence,
    NonFinite,
    NonSquare,
    NotHermitian,
    NotPositiveSemidefinite,
    ShapeMismatch,
    ZeroMatrix,
)

MAX_SWEEPS = 100
OFFDIAG_REL_TOL = 1e-14
DEFAULT_HERMITIAN_TOL = 1e-12
DEFAULT_RANK_TOL = 1e-9
# one-sided Jacobi: columns p, q count as orthogonal once |<p,q>| <= this * |p| |q|
_ORTHO_TOL = 1e-15


class EigenDecomposition(NamedTuple):
    """Eigenvalues (ascending) and orthonormal eigenvectors stored as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a finite 2-D complex128 array (copying only if needed)."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ShapeMismatch(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFinite("matrix has NaN or infinite entries")
    return m


def frobenius_norm(a) -> float:
    m = np.asarray(a)
    return math.sqrt(float(np.sum(m.real * m.real + m.imag * m.imag)))


def frobenius_inner(a, b) -> complex:
    """Return ``Tr(A B^dagger)``, i.e. the sum over ``A_ij * conj(B_ij)``."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    return complex(np.sum(a * b.conj()))


def _jacobi_rotation(app: float, aqq: float, apq: complex) -> tuple[float, complex]:
    """Return ``(c, z)`` for the unitary ``R = [[c, z], [-conj(z), c]]``.

    ``R^H [[app, apq], [conj(apq), aqq]] R`` is diagonal.
    """
    mag = abs(apq)
    zeta = (aqq - app) / (2.0 * mag)
    t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
    c = 1.0 / math.sqrt(1.0 + t * t)
    return c, (t * c) * (apq / mag)


def _rotate_columns(x: np.ndarray, p: int, q: int, c: float, z: complex) -> None:
    xp = x[:, p].copy()
    xq = x[:, q]
    x[:, p] = c * xp - z.conjugate() * xq
    x[:, q] = z * xp + c * xq


def hermitian_eig(m, tol: float = DEFAULT_HERMITIAN_TOL, psd: bool = False) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    m : array_like
        Square Hermitian matrix.
    tol : float
        Relative Hermiticity tolerance: ``||M - M^H||_F <= tol * ||M||_F``.
        With ``psd=True`` it is also the relative slack below zero that is
        attributed to roundoff.
    psd : bool
        The caller guarantees ``M`` is positive semidefinite (e.g. a Gram
        matrix ``A A^H``).  Eigenvalues in ``[-tol*||M||_F, 0)`` are snapped
        to zero; anything more negative raises ``NotPositiveSemidefinite``.

    Returns
    -------
    EigenDecomposition
        Ascending eigenvalues and a unitary matrix of eigenvectors (columns).

    Raises
    ------
    NonSquare, NotHermitian, NoConvergence
    """
    a = as_matrix(m)
    n, cols = a.shape
    if n != cols:
        raise NonSquare(f"matrix is {n}x{cols}")
    scale = frobenius_norm(a)
    v = np.eye(n, dtype=np.complex128)
    if scale == 0.0:
        return EigenDecomposition(np.zeros(n), v)
    asym = frobenius_norm(a - a.conj().T)
    if asym > tol * scale:
        raise NotHermitian(f"||M - M^H||_F = {asym:.3e} exceeds {tol:.1e} * ||M||_F")
    a = 0.5 * (a + a.conj().T)
    threshold = OFFDIAG_REL_TOL * scale

    for _ in range(MAX_SWEEPS):
        off = np.abs(a - np.diag(np.diag(a)))
        if off.max() < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < threshold:
                    continue
                c, z = _jacobi_rotation(a[p, p].real, a[q, q].real, apq)
                _rotate_columns(a, p, q, c, z)
                # rows transform with R^H
                ap = a[p, :].copy()
                aq = a[q, :]
                a[p, :] = c * ap - z * aq
                a[q, :] = z.conjugate() * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                _rotate_columns(v, p, q, c, z)
    else:
        raise NoConvergence(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")

    lam = np.diag(a).real.copy()
    order = np.argsort(lam, kind="stable")
    lam = lam[order]
    v = v[:, order]
    if psd:
        floor = -tol * scale
        if lam[0] < floor:
            raise NotPositiveSemidefinite(f"eigenvalue {lam[0]:.3e} below {floor:.3e}")
        lam[lam < 0.0] = 0.0
    return EigenDecomposition(lam, v)


def eigvals_ascending(m, tol: float = DEFAULT_HERMITIAN_TOL, psd: bool = False) -> np.ndarray:
    return hermitian_eig(m, tol=tol, psd=psd).eigenvalues


def singular_values(m) -> np.ndarray:
    """Singular values of ``M`` in descending order, ``rows(M)`` of them.

    Computed by one-sided (Hestenes) Jacobi on ``M`` itself rather than by
    square-rooting the spectrum of ``M M^H``, which keeps zero singular
    values at roundoff level (~1e-16) instead of ~1e-8.
    """
    a = as_matrix(m)
    if frobenius_norm(a) == 0.0:
        raise ZeroMatrix("singular values of the zero matrix are not defined here")
    rows, cols = a.shape
    # orthogonalise whichever side has fewer vectors; pad with exact zeros
    w = a.T.copy() if rows <= cols else a.copy()
    k = w.shape[1]
    for _ in range(MAX_SWEEPS):
        rotated = False
        for p in range(k - 1):
            for q in range(p + 1, k):
                wp = w[:, p]
                wq = w[:, q]
                alpha = float(np.vdot(wp, wp).real)
                beta = float(np.vdot(wq, wq).real)
                gamma = complex(np.vdot(wp, wq))
                if abs(gamma) <= _ORTHO_TOL * math.sqrt(alpha * beta):
                    continue
                rotated = True
                c, z = _jacobi_rotation(alpha, beta, gamma)
                _rotate_columns(w, p, q, c, z)
        if not rotated:
            break
    else:
        raise NoConvergence(f"one-sided Jacobi did not converge in {MAX_SWEEPS} sweeps")
    sv = np.sqrt(np.sum(w.real * w.real + w.imag * w.imag, axis=0))
    sv = np.sort(sv)[::-1]
    if k < rows:
        sv = np.concatenate([sv, np.zeros(rows - k)])
    return sv


def numerical_rank(m, rel_tol: float = DEFAULT_RANK_TOL) -> int:
    """Number of singular values strictly above ``rel_tol * sigma_max``."""
    if not 0.0 < rel_tol < 1.0:
        raise ValueError(f"rel_tol must lie in (0, 1), got {rel_tol}")
    sv = singular_values(m)
    return int(np.count_nonzero(sv > rel_tol * sv[0]))


def weyl_check(h, k, tol: float = 1e-10, *, herm_tol: float = DEFAULT_HERMITIAN_TOL) -> bool:
    """Check ``lam_i(H) + lam_min(K) <= lam_i(H+K) <= lam_i(H) + lam_max(K)`` for all i.

    Returns False only if some index violates either chain by more than ``tol``.
    """
    return weyl_slack(h, k, herm_tol=herm_tol) >= -tol


def weyl_slack(h, k, *, herm_tol: float = DEFAULT_HERMITIAN_TOL) -> float:
    """Smallest slack over both Weyl chains; negative means a violation."""
    h = as_matrix(h)
    k = as_matrix(k)
    if h.shape != k.shape:
        raise ShapeMismatch(f"shapes differ: {h.shape} vs {k.shape}")
    lh = eigvals_ascending(h, tol=herm_tol)
    lk = eigvals_ascending(k, tol=herm_tol)
    lhk = eigvals_ascending(h + k, tol=herm_tol)
    lower = lhk - (lh + lk[0])
    upper = (lh + lk[-1]) - lhk
    return float(min(lower.min(), upper.min()))
