"""Bipartite pure states in matrix form.

A state ``sum_ij a_ij |i>_A |j>_B`` of an ``n x m`` system is stored as the
``n x m`` matrix ``psi = [a_ij]``.  Row-major flattening of ``psi`` gives the
usual state vector (party-B index fastest).  In this picture

* ``psi @ psi^H`` is the reduced density matrix (an ``n x n`` matrix),
* the singular values of ``psi`` are the Schmidt coefficients,
* local unitaries act as ``psi -> U psi V^T``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    DegenerateSuperposition,
    FormulaMismatch,
    LengthMismatch,
    NotNormalized,
    ShapeMismatch,
    ShrinkNotAllowed,
    ZeroVector,
)

NORM_TOL = 1e-12
AMPLITUDE_TOL = 1e-12
FORMULA_AGREEMENT_TOL = 1e-10
DEFAULT_RELATION_TOL = 1e-10
DEGENERATE_NORM_SQ = 1e-12


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized bipartite pure state held as an ``n x m`` matrix.

    ``psi`` is stored as a read-only copy.  Use :func:`from_vector` or
    :meth:`from_matrix` to build a state from unnormalized amplitudes.
    """

    psi: np.ndarray

    def __post_init__(self):
        psi = linalg.as_matrix(self.psi).copy()
        norm = linalg.frobenius_norm(psi)
        if abs(norm - 1.0) > NORM_TOL:
            raise NotNormalized(f"||psi||_F = {norm!r}, expected 1")
        psi.setflags(write=False)
        object.__setattr__(self, "psi", psi)

    @classmethod
    def from_matrix(cls, matrix) -> "PureState":
        """Normalize ``matrix`` to unit Frobenius norm and wrap it."""
        m = linalg.as_matrix(matrix)
        norm = linalg.frobenius_norm(m)
        if norm == 0.0:
            raise ZeroVector("cannot normalize the zero matrix")
        return cls(m / norm)

    @property
    def n(self) -> int:
        return self.psi.shape[0]

    @property
    def m(self) -> int:
        return self.psi.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.psi.shape

    def vector(self) -> np.ndarray:
        """Row-major amplitude vector ``[a_00, a_01, ..., a_{n-1,m-1}]``."""
        return self.psi.reshape(-1).copy()

    def __repr__(self):
        return f"PureState(n={self.n}, m={self.m})"


class Relation(enum.Enum):
    BIORTHOGONAL = "biorthogonal"
    TRACE_ORTHOGONAL = "trace-orthogonal"
    GENERAL = "general"


@dataclass(frozen=True)
class RelationClass:
    """Result of :func:`classify_relation` with the residuals it was based on."""

    kind: Relation
    tol: float
    product_residual: float  # ||Psi Phi^H||_F
    overlap_residual: float  # |Tr Psi Phi^H|


@dataclass(frozen=True)
class SuperpositionInput:
    """Amplitudes ``alpha, beta`` with ``|alpha|^2 + |beta|^2 = 1`` and two same-shape states."""

    alpha: complex
    beta: complex
    state_psi: PureState
    state_phi: PureState

    def __post_init__(self):
        alpha = complex(self.alpha)
        beta = complex(self.beta)
        total = abs(alpha) ** 2 + abs(beta) ** 2
        if abs(total - 1.0) > AMPLITUDE_TOL:
            raise ValueError(f"|alpha|^2 + |beta|^2 = {total!r}, expected 1")
        if self.state_psi.shape != self.state_phi.shape:
            raise ShapeMismatch(
                f"states have shapes {self.state_psi.shape} and {self.state_phi.shape}; pad first"
            )
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @classmethod
    def padded(cls, alpha, beta, psi: PureState, phi: PureState) -> "SuperpositionInput":
        """Zero-pad both states to their common bounding shape first."""
        n = max(psi.n, phi.n)
        m = max(psi.m, phi.m)
        return cls(alpha, beta, pad_to(psi, n, m), pad_to(phi, n, m))

    @classmethod
    def from_alpha_sq(cls, alpha_sq: float, psi: PureState, phi: PureState,
                      phase: float = 0.0) -> "SuperpositionInput":
        """Real ``alpha = sqrt(alpha_sq)``; ``beta`` carries the relative phase."""
        if not 0.0 <= alpha_sq <= 1.0:
            raise ValueError(f"alpha_sq must lie in [0, 1], got {alpha_sq}")
        beta = math.sqrt(1.0 - alpha_sq) * complex(math.cos(phase), math.sin(phase))
        return cls.padded(math.sqrt(alpha_sq), beta, psi, phi)

    @property
    def alpha_sq(self) -> float:
        return abs(self.alpha) ** 2

    @property
    def beta_sq(self) -> float:
        return abs(self.beta) ** 2


def from_vector(v, n: int, m: int) -> PureState:
    """Reshape a row-major amplitude vector into an ``n x m`` state, normalizing it."""
    arr = np.asarray(v, dtype=np.complex128).reshape(-1)
    if n < 1 or m < 1:
        raise LengthMismatch(f"dimensions must be positive, got {n}x{m}")
    if arr.size != n * m:
        raise LengthMismatch(f"expected {n * m} amplitudes for {n}x{m}, got {arr.size}")
    if linalg.frobenius_norm(arr) == 0.0:
        raise ZeroVector("amplitude vector is zero")
    return PureState.from_matrix(arr.reshape(n, m))


def reduced_density(s: PureState) -> np.ndarray:
    """``psi psi^H``: the reduced state of party A (an ``n x n`` matrix)."""
    return s.psi @ s.psi.conj().T


def schmidt_probabilities(s: PureState) -> np.ndarray:
    """Squared singular values of ``psi`` (descending), i.e. the spectrum of ``psi psi^H``."""
    return linalg.singular_values(s.psi) ** 2


def concurrence_trace(s: PureState) -> float:
    """``sqrt(1 - Tr rho^2)`` with ``rho = psi psi^H``; no eigendecomposition involved."""
    rho = reduced_density(s)
    purity = float(np.sum(rho.real * rho.real + rho.imag * rho.imag))
    return math.sqrt(max(0.0, 1.0 - purity))


def concurrence_from_spectrum(p) -> float:
    """``sqrt(1 - sum p_i^2)`` for a probability vector ``p`` (squared Schmidt coefficients)."""
    p = np.asarray(p, dtype=float)
    return math.sqrt(max(0.0, 1.0 - math.fsum(p * p)))


def concurrence_pairwise(p) -> float:
    """``sqrt(sum_{i != j} p_i p_j)``, summed pair by pair."""
    p = [float(x) for x in p]
    terms = [p[i] * p[j] for i in range(len(p)) for j in range(len(p)) if i != j]
    return math.sqrt(max(0.0, math.fsum(terms)))


def concurrence_values(s: PureState) -> tuple[float, float, float]:
    """The three equivalent concurrence formulas: trace, quartic Schmidt sum, pair sum."""
    p = schmidt_probabilities(s)
    return concurrence_trace(s), concurrence_from_spectrum(p), concurrence_pairwise(p)


def concurrence_and_spectrum(s: PureState) -> tuple[float, np.ndarray]:
    """Concurrence together with the squared Schmidt coefficients (descending).

    All three equivalent formulas are evaluated and compared on the squared
    scale, where the comparison is well conditioned; a disagreement beyond
    ``1e-10`` raises :class:`FormulaMismatch`.  The pair-sum value is returned
    because it keeps full relative accuracy for nearly separable states, where
    ``sqrt(1 - Tr rho^2)`` amplifies roundoff to ~1e-8.
    """
    p = schmidt_probabilities(s)
    values = (concurrence_trace(s), concurrence_from_spectrum(p), concurrence_pairwise(p))
    squares = [c * c for c in values]
    if max(squares) - min(squares) > FORMULA_AGREEMENT_TOL:
        raise FormulaMismatch(f"concurrence formulas disagree: {values!r}")
    return values[2], p


def concurrence(s: PureState) -> float:
    """Concurrence ``sqrt(1 - Tr rho^2)`` of a normalized pure state (cross-checked)."""
    return concurrence_and_spectrum(s)[0]


def max_concurrence(n: int, m: int) -> float:
    return math.sqrt(1.0 - 1.0 / min(n, m))


def pad_to(s: PureState, n_new: int, m_new: int) -> PureState:
    """Embed ``psi`` in the top-left block of an ``n_new x m_new`` zero matrix."""
    if n_new < s.n or m_new < s.m:
        raise ShrinkNotAllowed(f"cannot pad {s.n}x{s.m} down to {n_new}x{m_new}")
    if (n_new, m_new) == s.shape:
        return s
    out = np.zeros((n_new, m_new), dtype=np.complex128)
    out[: s.n, : s.m] = s.psi
    return PureState(out)


def superpose(inp: SuperpositionInput) -> tuple[np.ndarray, float]:
    """Return the unnormalized ``Gamma = alpha Psi + beta Phi`` and ``||Gamma||_F^2``."""
    gamma = inp.alpha * inp.state_psi.psi + inp.beta * inp.state_phi.psi
    norm_sq = float(np.sum(gamma.real * gamma.real + gamma.imag * gamma.imag))
    if norm_sq < DEGENERATE_NORM_SQ:
        raise DegenerateSuperposition(f"||Gamma||^2 = {norm_sq:.3e}; concurrence undefined")
    return gamma, norm_sq


def normalized(gamma) -> PureState:
    return PureState.from_matrix(gamma)


def classify_relation(a: PureState, b: PureState, tol: float = DEFAULT_RELATION_TOL) -> RelationClass:
    """Strongest relation between two same-shape states.

    ``BIORTHOGONAL`` if ``||Psi Phi^H||_F <= tol``, else ``TRACE_ORTHOGONAL`` if
    ``|Tr Psi Phi^H| <= tol``, else ``GENERAL``.
    """
    if a.shape != b.shape:
        raise ShapeMismatch(f"states have shapes {a.shape} and {b.shape}; pad first")
    prod = linalg.frobenius_norm(a.psi @ b.psi.conj().T)
    overlap = abs(linalg.frobenius_inner(a.psi, b.psi))
    if prod <= tol:
        kind = Relation.BIORTHOGONAL
    elif overlap <= tol:
        kind = Relation.TRACE_ORTHOGONAL
    else:
        kind = Relation.GENERAL
    return RelationClass(kind, tol, prod, overlap)
