"""Seeded random states and premise-satisfying state pairs.

Randomness comes from numpy's Philox-4x64 counter-based bit generator keyed
through :class:`numpy.random.SeedSequence`.  A stream is identified by the
tuple ``(seed, *salt)``; campaign trial ``i`` uses ``(seed, i)``, so any trial
can be replayed on its own and partitioned runs reproduce serial ones.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import bounds, linalg
from .errors import DimensionTooSmall, EmptyRange
from .states import PureState, SuperpositionInput

_MASK64 = (1 << 64) - 1
# salts for draws made directly from a config (no caller-supplied stream)
_SALT_HAAR = 0x48414152
_SALT_BIORTH = 0x42494F52
_SALT_ORTH = 0x4F525448
_SALT_AMPS = 0x414D5053
_SALT_SEARCH = 0x53524348

GRAM_SCHMIDT_MIN_RESIDUAL = 1e-6


def make_rng(seed: int, *salt: int) -> np.random.Generator:
    """Philox generator for the stream ``(seed, *salt)``; all entries taken mod 2**64."""
    entropy = [int(seed) & _MASK64] + [int(s) & _MASK64 for s in salt]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int
    n: int
    m: int
    alpha_sq_range: tuple[float, float] = (0.0, 1.0)
    split: int | None = field(default=None)  # size of the first B-side block for biorthogonal pairs

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise DimensionTooSmall(f"dimensions must be positive, got {self.n}x{self.m}")
        lo, hi = (float(x) for x in self.alpha_sq_range)
        if not (0.0 <= lo <= 1.0 and 0.0 <= hi <= 1.0):
            raise ValueError(f"alpha_sq_range {self.alpha_sq_range} not within [0, 1]")
        if lo > hi:
            raise EmptyRange(f"alpha_sq_range {self.alpha_sq_range} is empty")
        object.__setattr__(self, "alpha_sq_range", (lo, hi))
        object.__setattr__(self, "seed", int(self.seed) & _MASK64)

    def with_dims(self, n: int, m: int) -> "GeneratorConfig":
        return replace(self, n=n, m=m)

    def rng(self, *salt: int) -> np.random.Generator:
        return make_rng(self.seed, *salt)


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def haar_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    """Haar-random ``d x d`` unitary: QR of a Ginibre matrix with the phases of R removed."""
    q, r = np.linalg.qr(complex_gaussian(rng, (d, d)))
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def _haar_matrix(rng: np.random.Generator, n: int, m: int) -> np.ndarray:
    g = complex_gaussian(rng, (n, m))
    return g / linalg.frobenius_norm(g)


def haar_state(cfg: GeneratorConfig, rng: np.random.Generator | None = None) -> PureState:
    """Uniformly random unit vector in the ``n*m``-dimensional state space."""
    rng = rng if rng is not None else cfg.rng(_SALT_HAAR)
    return PureState(_haar_matrix(rng, cfg.n, cfg.m))


def biorthogonal_pair(cfg: GeneratorConfig, rng: np.random.Generator | None = None
                      ) -> tuple[PureState, PureState]:
    """Random ``(Psi, Phi)`` with ``Psi Phi^H = 0``.

    A Haar unitary on party B is split into two blocks of columns; every row
    of ``Psi`` lies in the span of the first block and every row of ``Phi``
    in the span of the second.  Party-A supports are unconstrained.
    """
    if cfg.m < 2:
        raise DimensionTooSmall(f"biorthogonal pairs need m >= 2, got m={cfg.m}")
    split = cfg.split if cfg.split is not None else math.ceil(cfg.m / 2)
    if not 1 <= split < cfg.m:
        raise DimensionTooSmall(f"split {split} leaves an empty block for m={cfg.m}")
    rng = rng if rng is not None else cfg.rng(_SALT_BIORTH)
    w = haar_unitary(rng, cfg.m)
    w1, w2 = w[:, :split], w[:, split:]
    psi = complex_gaussian(rng, (cfg.n, split)) @ w1.T
    phi = complex_gaussian(rng, (cfg.n, cfg.m - split)) @ w2.T
    return PureState.from_matrix(psi), PureState.from_matrix(phi)


def orthogonal_to(psi: PureState, rng: np.random.Generator, draw=None) -> PureState:
    """Gram-Schmidt a fresh draw against ``psi``; redraws if the residual is tiny.

    ``draw(rng)`` produces the raw candidate matrix (default: Haar).
    """
    draw = draw or (lambda g: _haar_matrix(g, psi.n, psi.m))
    while True:
        x = draw(rng)
        x = x - np.vdot(psi.psi, x) * psi.psi
        norm = linalg.frobenius_norm(x)
        if norm >= GRAM_SCHMIDT_MIN_RESIDUAL:
            x = x / norm
            # second pass removes the O(eps) overlap left by the first
            x = x - np.vdot(psi.psi, x) * psi.psi
            return PureState.from_matrix(x)


def orthogonal_pair(cfg: GeneratorConfig, rng: np.random.Generator | None = None
                    ) -> tuple[PureState, PureState]:
    """``Psi`` Haar-random and ``Phi`` Haar-random on the orthogonal complement of ``Psi``."""
    if cfg.n * cfg.m < 2:
        raise DimensionTooSmall("orthogonal pairs need n*m >= 2")
    rng = rng if rng is not None else cfg.rng(_SALT_ORTH)
    psi = PureState(_haar_matrix(rng, cfg.n, cfg.m))
    return psi, orthogonal_to(psi, rng)


def random_amplitudes(cfg: GeneratorConfig, rng: np.random.Generator | None = None
                      ) -> tuple[complex, complex]:
    """``(alpha, beta)`` with ``|alpha|^2`` uniform on the configured range and random phases."""
    rng = rng if rng is not None else cfg.rng(_SALT_AMPS)
    lo, hi = cfg.alpha_sq_range
    a2 = lo if lo == hi else float(rng.uniform(lo, hi))
    th1, th2 = rng.uniform(0.0, 2.0 * math.pi, size=2)
    alpha = math.sqrt(a2) * complex(math.cos(th1), math.sin(th1))
    beta = math.sqrt(1.0 - a2) * complex(math.cos(th2), math.sin(th2))
    return alpha, beta


def random_hermitian(rng: np.random.Generator, d: int) -> np.ndarray:
    g = complex_gaussian(rng, (d, d))
    return 0.5 * (g + g.conj().T)


@dataclass(frozen=True)
class SearchResult:
    phi: PureState | None
    bound: float
    alpha: complex | None
    beta: complex | None
    found: bool
    trials: int


def _dominant_draw(n: int, m: int, weight: float):
    """Candidate with one dominant Schmidt coefficient (a product term plus noise)."""

    def draw(rng):
        u = complex_gaussian(rng, n)
        v = complex_gaussian(rng, m)
        x = np.outer(u / np.linalg.norm(u), v / np.linalg.norm(v))
        return x + weight * _haar_matrix(rng, n, m)

    return draw


def lower_bound_search(cfg: GeneratorConfig, psi: PureState, trials: int) -> SearchResult:
    """Random search for an orthogonal partner ``Phi`` with a large T2 lower bound.

    Even-numbered trials draw ``Phi`` uniformly from the orthogonal complement
    of ``psi``; odd-numbered trials bias towards a large top Schmidt
    coefficient of ``Phi``.  Amplitudes are drawn per trial from
    ``cfg.alpha_sq_range``.  Returns a null result (``found=False``,
    ``bound=0``) when no trial yields a positive lower bound.
    """
    best = SearchResult(None, 0.0, None, None, False, trials)
    if trials <= 0:
        return best
    for i in range(trials):
        rng = cfg.rng(_SALT_SEARCH, i)
        alpha, beta = random_amplitudes(cfg, rng)
        if i % 2:
            weight = float(rng.uniform(0.0, 0.5))
            phi = orthogonal_to(psi, rng, _dominant_draw(psi.n, psi.m, weight))
        else:
            phi = orthogonal_to(psi, rng)
        report = bounds.theorem2_bounds(SuperpositionInput(alpha, beta, psi, phi))
        if report.lower_combined > best.bound:
            best = SearchResult(phi, report.lower_combined, alpha, beta, True, trials)
    return best
