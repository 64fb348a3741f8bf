"""Lower and upper bounds on the concurrence of ``Gamma = alpha Psi + beta Phi``.

Three premises are handled:

``T1``  biorthogonal states, ``Psi Phi^H = 0``;
``T2``  orthogonal states, ``Tr Psi Phi^H = 0`` (so ``||Gamma|| = 1``);
``T3``  arbitrary normalized states; bounds are stated for
        ``||Gamma||^2 / 2 * C(Gamma / ||Gamma||)`` and reported here after
        multiplying by ``2 / ||Gamma||^2`` so every report is on the plain
        concurrence scale.

Every bound that carries a factor ``|alpha|^2`` in front of a function with
``1/|alpha|^2`` or ``1/|alpha|^4`` inside is evaluated in a division-free
form, so ``alpha = 0`` and ``beta = 0`` are ordinary inputs.  The *anchored*
pair of each report is ``(Psi-anchored, Phi-anchored)``: the second entry is
the same formula with the roles of ``(alpha, Psi)`` and ``(beta, Phi)``
swapped.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import linalg
from .errors import AlphaZero, DomainError, RelationViolation
from .states import (
    PureState,
    Relation,
    SuperpositionInput,
    classify_relation,
    concurrence_and_spectrum,
    superpose,
)

PREMISE_TOL = 1e-8
_SUM_TOL = 1e-12
_UNIT_SLACK = 1e-12


class Theorem(str, enum.Enum):
    T1 = "T1"
    T2 = "T2"
    T3 = "T3"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class BoundReport:
    """All bounds from one theorem for one superposition.

    ``lower_combined`` is the max of the anchored lower bounds and
    ``upper_combined`` the min of the anchored upper bounds; the
    ``*_symmetric`` values are the averaged forms, which are never tighter.
    ``condition_flag`` is ``None`` for T1.
    """

    theorem: Theorem
    actual_concurrence: float
    lower_individual: tuple[float, float]
    lower_combined: float
    lower_symmetric: float
    upper_individual: tuple[float, float]
    upper_combined: float
    upper_symmetric: float
    rank_r: int
    norm_sq: float
    condition_flag: bool | None
    lambda_max_psi: float
    lambda_max_phi: float
    alpha_sq: float
    beta_sq: float
    premise_residual: float = 0.0
    warning: str | None = None

    def chain(self) -> tuple[float, float, float, float, float]:
        """``(lower_symmetric, lower_combined, actual, upper_combined, upper_symmetric)``."""
        return (self.lower_symmetric, self.lower_combined, self.actual_concurrence,
                self.upper_combined, self.upper_symmetric)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["theorem"] = self.theorem.value
        d["lower_individual"] = list(self.lower_individual)
        d["upper_individual"] = list(self.upper_individual)
        return d


# ---------------------------------------------------------------------------
# scalar building blocks

def _check_amplitudes(alpha_sq: float, beta_sq: float) -> None:
    if alpha_sq < 0.0 or beta_sq < 0.0:
        raise DomainError(f"negative weight: alpha_sq={alpha_sq}, beta_sq={beta_sq}")
    if alpha_sq > 1.0 + _SUM_TOL or beta_sq > 1.0 + _SUM_TOL:
        raise DomainError(f"weight above 1: alpha_sq={alpha_sq}, beta_sq={beta_sq}")
    if abs(alpha_sq + beta_sq - 1.0) > _SUM_TOL:
        raise DomainError(f"alpha_sq + beta_sq = {alpha_sq + beta_sq!r}, expected 1")


def _check_c_sq(c_sq: float) -> None:
    if not 0.0 <= c_sq < 1.0:
        raise DomainError(f"squared concurrence must lie in [0, 1), got {c_sq}")


def _check_lambda(lambda_max: float) -> float:
    if lambda_max < 0.0 or lambda_max > 1.0 + _UNIT_SLACK:
        raise DomainError(f"lambda_max must lie in [0, 1], got {lambda_max}")
    return min(lambda_max, 1.0)


def _check_rank(r: int) -> None:
    if int(r) != r or r < 1:
        raise DomainError(f"rank must be a positive integer, got {r}")


def c_tilde_scaled(c_psi: float, alpha_sq: float, beta_sq: float) -> float:
    """``|alpha|^2 * C~(Psi, alpha) = sqrt(a^2 c^2 + b^2 + 2 a b)`` with ``a, b = |alpha|^2, |beta|^2``."""
    if c_psi < 0.0:
        raise DomainError(f"concurrence must be non-negative, got {c_psi}")
    _check_c_sq(c_psi * c_psi)
    _check_amplitudes(alpha_sq, beta_sq)
    a, b = alpha_sq, beta_sq
    return math.sqrt(a * a * c_psi * c_psi + b * b + 2.0 * a * b)


def f_func(c_sq: float, ratio: float, lambda_max: float, r: int) -> float:
    """``sqrt(c^2 + (r-1) t lam (2 + r t lam))`` with ``t = |beta|^2 / |alpha|^2``."""
    _check_c_sq(c_sq)
    if not (ratio >= 0.0 and math.isfinite(ratio)):
        raise DomainError(f"ratio must be finite and non-negative, got {ratio}")
    lam = _check_lambda(lambda_max)
    _check_rank(r)
    x = ratio * lam
    return math.sqrt(c_sq + (r - 1) * x * (2.0 + r * x))


def f_scaled(c_sq: float, alpha_sq: float, beta_sq: float, lambda_max: float, r: int) -> float:
    """``|alpha|^2 f`` without dividing by ``|alpha|^2``; finite at ``alpha = 0``."""
    _check_c_sq(c_sq)
    _check_amplitudes(alpha_sq, beta_sq)
    lam = _check_lambda(lambda_max)
    _check_rank(r)
    a, b = alpha_sq, beta_sq
    return math.sqrt(a * a * c_sq + (r - 1) * b * lam * (2.0 * a + r * b * lam))


def _lower_bracket(c_sq, alpha_sq, beta_sq, lam, r, subtracted) -> float:
    a, b = alpha_sq, beta_sq
    return a * a * c_sq + b * b * (1.0 - r * lam * lam) + 2.0 * a * b * lam - subtracted


def l_func(c_sq: float, alpha_sq: float, beta_sq: float, lambda_max: float, r: int) -> float:
    """The unscaled ``l`` function (divides by ``|alpha|^4``).

    Raises :class:`AlphaZero` at ``alpha_sq == 0``; use :func:`l_scaled` there.
    """
    _check_c_sq(c_sq)
    _check_amplitudes(alpha_sq, beta_sq)
    lam = _check_lambda(lambda_max)
    _check_rank(r)
    if alpha_sq == 0.0:
        raise AlphaZero("l is singular at alpha = 0; use the scaled form")
    t = beta_sq / alpha_sq
    inner = c_sq + t * t * (1.0 - r * lam * lam) + 2.0 * t * lam - 3.0 / (4.0 * alpha_sq * alpha_sq)
    return math.sqrt(max(0.0, inner))


def l_scaled(c_sq: float, alpha_sq: float, beta_sq: float, lambda_max: float, r: int) -> float:
    """``|alpha|^2 l``: ``sqrt(max{0, a^2 c^2 + b^2 (1 - r lam^2) + 2 a b lam - 3/4})``."""
    _check_c_sq(c_sq)
    _check_amplitudes(alpha_sq, beta_sq)
    lam = _check_lambda(lambda_max)
    _check_rank(r)
    return math.sqrt(max(0.0, _lower_bracket(c_sq, alpha_sq, beta_sq, lam, r, 0.75)))


def l_tilde_func(c_sq: float, alpha_sq: float, beta_sq: float, lambda_max: float, r: int,
                 norm_sq: float) -> float:
    """``|alpha|^2 l~``: as :func:`l_scaled` with ``3/4`` replaced by ``1 - norm_sq^2 / 4``."""
    _check_c_sq(c_sq)
    _check_amplitudes(alpha_sq, beta_sq)
    lam = _check_lambda(lambda_max)
    _check_rank(r)
    if not 0.0 < norm_sq <= 2.0 + _UNIT_SLACK:
        raise DomainError(f"norm_sq must lie in (0, 2], got {norm_sq}")
    subtracted = 1.0 - norm_sq * norm_sq / 4.0
    return math.sqrt(max(0.0, _lower_bracket(c_sq, alpha_sq, beta_sq, lam, r, subtracted)))


def condition29_margin(c_sq: float, alpha_sq: float, beta_sq: float, r: int) -> float:
    return beta_sq * beta_sq + alpha_sq * alpha_sq * (c_sq + 1.0 / r) - 0.75


def condition38_margin(c_sq: float, alpha_sq: float, beta_sq: float, r: int, norm_sq: float) -> float:
    return beta_sq * beta_sq + alpha_sq * alpha_sq * (c_sq + 1.0 / r) - (1.0 - norm_sq * norm_sq / 4.0)


def condition29(c_sq: float, alpha_sq: float, beta_sq: float, r: int) -> bool:
    """``|beta|^4 + |alpha|^4 (C^2 + 1/r) > 3/4``, strict and without tolerance (advisory)."""
    return condition29_margin(c_sq, alpha_sq, beta_sq, r) > 0.0


def condition38(c_sq: float, alpha_sq: float, beta_sq: float, r: int, norm_sq: float) -> bool:
    """``|beta|^4 + |alpha|^4 (C^2 + 1/r) > 1 - norm_sq^2 / 4``, strict (advisory)."""
    return condition38_margin(c_sq, alpha_sq, beta_sq, r, norm_sq) > 0.0


# ---------------------------------------------------------------------------
# reports

@dataclass(frozen=True)
class _Profile:
    c: float
    c_sq: float
    lambda_max: float


def _profile(s: PureState) -> _Profile:
    c, p = concurrence_and_spectrum(s)
    return _Profile(c, min(c * c, math.nextafter(1.0, 0.0)), float(min(p[0], 1.0)))


@dataclass(frozen=True)
class _Evaluation:
    alpha_sq: float
    beta_sq: float
    psi: _Profile
    phi: _Profile
    actual: float
    rank_r: int
    norm_sq: float


def _evaluate(inp: SuperpositionInput) -> _Evaluation:
    gamma, norm_sq = superpose(inp)
    actual, p_gamma = concurrence_and_spectrum(PureState.from_matrix(gamma))
    # rank of Gamma: sigma_i / sigma_max = sqrt(p_i / p_max)
    rank_r = int(np.count_nonzero(np.sqrt(p_gamma / p_gamma[0]) > linalg.DEFAULT_RANK_TOL))
    a = inp.alpha_sq
    return _Evaluation(a, 1.0 - a, _profile(inp.state_psi), _profile(inp.state_phi),
                       actual, rank_r, norm_sq)


def _premise(inp: SuperpositionInput, theorem: Theorem, force: bool) -> tuple[float, str | None]:
    psi, phi = inp.state_psi.psi, inp.state_phi.psi
    if theorem is Theorem.T1:
        residual = linalg.frobenius_norm(psi @ phi.conj().T)
        what = "||Psi Phi^H||_F"
    else:
        residual = abs(linalg.frobenius_inner(psi, phi))
        what = "|Tr Psi Phi^H|"
    if residual <= PREMISE_TOL:
        return residual, None
    msg = f"{theorem.value} premise fails: {what} = {residual:.3e} > {PREMISE_TOL:.0e}"
    if not force:
        raise RelationViolation(msg)
    return residual, msg + " (forced)"


def theorem1_bounds(inp: SuperpositionInput, force: bool = False) -> BoundReport:
    """Bounds for biorthogonal states (``Psi Phi^H = 0``).

    Anchored lower bounds are ``|alpha|^2 C(Psi)`` and ``|beta|^2 C(Phi)``;
    anchored upper bounds are ``sqrt(|alpha|^4 C^2(Psi) + |beta|^4 + 2|alpha|^2|beta|^2)``
    and its swap.  Symmetric forms are the plain averages.
    """
    residual, warning = _premise(inp, Theorem.T1, force)
    ev = _evaluate(inp)
    a, b = ev.alpha_sq, ev.beta_sq
    lower = (a * ev.psi.c, b * ev.phi.c)
    upper = (c_tilde_scaled(ev.psi.c, a, b), c_tilde_scaled(ev.phi.c, b, a))
    return BoundReport(
        theorem=Theorem.T1,
        actual_concurrence=ev.actual,
        lower_individual=lower,
        lower_combined=max(lower),
        lower_symmetric=0.5 * (lower[0] + lower[1]),
        upper_individual=upper,
        upper_combined=min(upper),
        upper_symmetric=0.5 * (upper[0] + upper[1]),
        rank_r=ev.rank_r,
        norm_sq=ev.norm_sq,
        condition_flag=None,
        lambda_max_psi=ev.psi.lambda_max,
        lambda_max_phi=ev.phi.lambda_max,
        alpha_sq=a,
        beta_sq=b,
        premise_residual=residual,
        warning=warning,
    )


def _better_anchor(lower: tuple[float, float], margins: tuple[float, float]) -> int:
    if lower[0] != lower[1]:
        return 0 if lower[0] > lower[1] else 1
    return 0 if margins[0] >= margins[1] else 1


def theorem2_bounds(inp: SuperpositionInput, force: bool = False) -> BoundReport:
    """Bounds for orthogonal states (``Tr Psi Phi^H = 0``).

    ``C <= 2 min{|alpha|^2 f(alpha, Psi, Phi), |beta|^2 f(beta, Phi, Psi)}`` and
    ``C >= 2 max{|alpha|^2 l(alpha, Psi, Phi), |beta|^2 l(beta, Phi, Psi)}``;
    the symmetric forms are the sums ``|alpha|^2 f + |beta|^2 f`` (resp. ``l``).
    ``condition_flag`` is the nonzero-lower-bound condition for the anchor that
    gives the larger lower bound.
    """
    residual, warning = _premise(inp, Theorem.T2, force)
    ev = _evaluate(inp)
    a, b, r = ev.alpha_sq, ev.beta_sq, ev.rank_r
    f_pair = (f_scaled(ev.psi.c_sq, a, b, ev.phi.lambda_max, r),
              f_scaled(ev.phi.c_sq, b, a, ev.psi.lambda_max, r))
    l_pair = (l_scaled(ev.psi.c_sq, a, b, ev.phi.lambda_max, r),
              l_scaled(ev.phi.c_sq, b, a, ev.psi.lambda_max, r))
    lower = (2.0 * l_pair[0], 2.0 * l_pair[1])
    upper = (2.0 * f_pair[0], 2.0 * f_pair[1])
    margins = (condition29_margin(ev.psi.c_sq, a, b, r), condition29_margin(ev.phi.c_sq, b, a, r))
    anchor = _better_anchor(lower, margins)
    return BoundReport(
        theorem=Theorem.T2,
        actual_concurrence=ev.actual,
        lower_individual=lower,
        lower_combined=max(lower),
        lower_symmetric=l_pair[0] + l_pair[1],
        upper_individual=upper,
        upper_combined=min(upper),
        upper_symmetric=f_pair[0] + f_pair[1],
        rank_r=r,
        norm_sq=ev.norm_sq,
        condition_flag=margins[anchor] > 0.0,
        lambda_max_psi=ev.psi.lambda_max,
        lambda_max_phi=ev.phi.lambda_max,
        alpha_sq=a,
        beta_sq=b,
        premise_residual=residual,
        warning=warning,
    )


def theorem3_bounds(inp: SuperpositionInput) -> BoundReport:
    """Bounds for arbitrary states, rescaled by ``2 / ||Gamma||^2``.

    ``actual_concurrence`` is the concurrence of ``Gamma / ||Gamma||``.
    """
    ev = _evaluate(inp)
    a, b, r, ns = ev.alpha_sq, ev.beta_sq, ev.rank_r, ev.norm_sq
    f_pair = (f_scaled(ev.psi.c_sq, a, b, ev.phi.lambda_max, r),
              f_scaled(ev.phi.c_sq, b, a, ev.psi.lambda_max, r))
    l_pair = (l_tilde_func(ev.psi.c_sq, a, b, ev.phi.lambda_max, r, ns),
              l_tilde_func(ev.phi.c_sq, b, a, ev.psi.lambda_max, r, ns))
    k = 2.0 / ns
    lower = (k * l_pair[0], k * l_pair[1])
    upper = (k * f_pair[0], k * f_pair[1])
    margins = (condition38_margin(ev.psi.c_sq, a, b, r, ns),
               condition38_margin(ev.phi.c_sq, b, a, r, ns))
    anchor = _better_anchor(lower, margins)
    return BoundReport(
        theorem=Theorem.T3,
        actual_concurrence=ev.actual,
        lower_individual=lower,
        lower_combined=max(lower),
        lower_symmetric=0.5 * k * (l_pair[0] + l_pair[1]),
        upper_individual=upper,
        upper_combined=min(upper),
        upper_symmetric=0.5 * k * (f_pair[0] + f_pair[1]),
        rank_r=r,
        norm_sq=ns,
        condition_flag=margins[anchor] > 0.0,
        lambda_max_psi=ev.psi.lambda_max,
        lambda_max_phi=ev.phi.lambda_max,
        alpha_sq=a,
        beta_sq=b,
    )


def auto_theorem(psi: PureState, phi: PureState, tol: float = PREMISE_TOL) -> Theorem:
    """Strongest theorem whose premise the pair satisfies."""
    kind = classify_relation(psi, phi, tol).kind
    if kind is Relation.BIORTHOGONAL:
        return Theorem.T1
    if kind is Relation.TRACE_ORTHOGONAL:
        return Theorem.T2
    return Theorem.T3


def bounds(inp: SuperpositionInput, theorem: Theorem | str = "auto", force: bool = False) -> BoundReport:
    """Dispatch to the requested theorem; ``"auto"`` picks the strongest applicable one."""
    if theorem == "auto":
        theorem = auto_theorem(inp.state_psi, inp.state_phi)
    theorem = Theorem(theorem)
    if theorem is Theorem.T1:
        return theorem1_bounds(inp, force=force)
    if theorem is Theorem.T2:
        return theorem2_bounds(inp, force=force)
    return theorem3_bounds(inp)
