import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superpose import bounds, generators, states
from superpose.bounds import Theorem
from superpose.errors import AlphaZero, DomainError, RelationViolation
from superpose.states import SuperpositionInput

BELL = states.from_vector([1, 0, 0, 1], 2, 2)
KET00 = states.from_vector([1, 0, 0, 0], 2, 2)
KET01 = states.from_vector([0, 1, 0, 0], 2, 2)
KET11 = states.from_vector([0, 0, 0, 1], 2, 2)
H = 1 / math.sqrt(2)

TOL = 1e-8
seeds = st.integers(0, 2**32 - 1)


def assert_chain(rep, tol=TOL):
    chain = rep.chain()
    for a, b in zip(chain, chain[1:]):
        assert a <= b + tol, chain


# -- scalar functions -------------------------------------------------------

def test_c_tilde_scaled():
    # c = 0, a = b = 1/2: sqrt(1/4 + 1/2)
    assert abs(bounds.c_tilde_scaled(0.0, 0.5, 0.5) - math.sqrt(0.75)) < 1e-15
    # beta = 0 collapses to alpha^2 C
    assert abs(bounds.c_tilde_scaled(0.3, 1.0, 0.0) - 0.3) < 1e-15


def test_f_values():
    # c^2 = 1/2, a = b = 1/2, lam = 1, r = 2: sqrt(1/8 + 1)
    assert abs(bounds.f_scaled(0.5, 0.5, 0.5, 1.0, 2) - math.sqrt(1.125)) < 1e-15
    # f = f_scaled / alpha^2
    assert abs(bounds.f_func(0.5, 1.0, 1.0, 2) - 2 * math.sqrt(1.125)) < 1e-14
    # rank one leaves only c
    assert bounds.f_scaled(0.25, 0.3, 0.7, 0.9, 1) == pytest.approx(0.3 * 0.5, abs=1e-15)


def test_l_values():
    # c^2 = 3/4, a = 0.9, b = 0.1, lam = 1, r = 4:
    # 0.6075 - 0.03 + 0.18 - 0.75 = 0.0075
    assert abs(bounds.l_scaled(0.75, 0.9, 0.1, 1.0, 4) - math.sqrt(0.0075)) < 1e-12
    assert abs(bounds.l_func(0.75, 0.9, 0.1, 1.0, 4) - math.sqrt(0.0075) / 0.9) < 1e-12
    assert bounds.l_scaled(0.5, 0.5, 0.5, 0.5, 2) == 0.0
    # at norm_sq = 1 the general form reduces to the orthogonal one
    assert bounds.l_tilde_func(0.75, 0.9, 0.1, 1.0, 4, 1.0) == bounds.l_scaled(0.75, 0.9, 0.1, 1.0, 4)


def test_scalar_domain_errors():
    with pytest.raises(AlphaZero):
        bounds.l_func(0.5, 0.0, 1.0, 0.5, 2)
    with pytest.raises(DomainError):
        bounds.f_scaled(1.0, 0.5, 0.5, 0.5, 2)
    with pytest.raises(DomainError):
        bounds.f_scaled(0.5, 0.5, 0.6, 0.5, 2)
    with pytest.raises(DomainError):
        bounds.f_scaled(0.5, 0.5, 0.5, 1.5, 2)
    with pytest.raises(DomainError):
        bounds.f_scaled(0.5, 0.5, 0.5, 0.5, 0)
    with pytest.raises(DomainError):
        bounds.l_tilde_func(0.5, 0.5, 0.5, 0.5, 2, 0.0)


def test_conditions():
    # 1/4 + 1/4 (1/2 + 1/2) = 1/2 < 3/4
    assert bounds.condition29_margin(0.5, 0.5, 0.5, 2) == pytest.approx(-0.25)
    assert not bounds.condition29(0.5, 0.5, 0.5, 2)
    assert bounds.condition29(0.75, 0.95, 0.05, 4)
    # norm_sq = 1 gives the same threshold
    assert bounds.condition38_margin(0.5, 0.5, 0.5, 2, 1.0) == bounds.condition29_margin(0.5, 0.5, 0.5, 2)


# -- reports on fixed states ------------------------------------------------

def test_t1_product_pair():
    rep = bounds.bounds(SuperpositionInput(H, H, KET00, KET11))
    assert rep.theorem is Theorem.T1
    assert rep.lower_combined == 0.0
    assert abs(rep.actual_concurrence - math.sqrt(0.5)) < 1e-12
    assert abs(rep.upper_combined - math.sqrt(0.75)) < 1e-12
    assert rep.condition_flag is None


def test_t2_bell_and_01():
    rep = bounds.bounds(SuperpositionInput(H, H, BELL, KET01))
    assert rep.theorem is Theorem.T2
    # Gamma = [[1/2, 1/sqrt2], [0, 1/2]], |det| = 1/4, C = sqrt(2 * 1/16)
    assert abs(rep.actual_concurrence - math.sqrt(1 / 8)) < 1e-12
    # Psi anchor: 2 sqrt(1/8 + 1); Phi anchor: 2 sqrt(3/8)
    assert rep.upper_individual == pytest.approx((2 * math.sqrt(1.125), 2 * math.sqrt(0.375)), abs=1e-12)
    assert rep.upper_combined == pytest.approx(2 * math.sqrt(0.375), abs=1e-12)
    assert rep.lower_combined == 0.0
    assert rep.rank_r == 2
    assert rep.condition_flag is False
    assert_chain(rep)


def test_t3_ket00_and_bell():
    rep = bounds.bounds(SuperpositionInput(H, H, KET00, BELL))
    assert rep.theorem is Theorem.T3
    # Gamma = diag(1/sqrt2 + 1/2, 1/2): norm^2 = (1/sqrt2 + 1/2)^2 + 1/4
    assert rep.norm_sq == pytest.approx(1.0 + H, abs=1e-12)
    assert rep.actual_concurrence == pytest.approx(0.5, abs=1e-12)
    assert_chain(rep)


def test_t3_lower_bound_counterexample():
    # Psi = Phi = |00>: Gamma = sqrt2 |00> is a product state, yet the general
    # lower bound is sqrt(1/2); the upper bound correctly gives 0
    rep = bounds.theorem3_bounds(SuperpositionInput(H, H, KET00, KET00))
    assert rep.actual_concurrence == 0.0
    assert rep.norm_sq == pytest.approx(2.0, abs=1e-15)
    assert rep.lower_combined == pytest.approx(math.sqrt(0.5), abs=1e-12)
    assert rep.upper_combined == pytest.approx(0.0, abs=1e-12)


def test_premise_enforced():
    inp = SuperpositionInput(H, H, BELL, KET00)
    with pytest.raises(RelationViolation):
        bounds.theorem1_bounds(inp)
    with pytest.raises(RelationViolation):
        bounds.bounds(inp, "T2")
    rep = bounds.theorem1_bounds(inp, force=True)
    assert rep.warning is not None
    assert rep.premise_residual == pytest.approx(H, abs=1e-12)


def test_auto_theorem():
    assert bounds.auto_theorem(KET00, KET11) is Theorem.T1
    assert bounds.auto_theorem(BELL, KET01) is Theorem.T2
    assert bounds.auto_theorem(BELL, KET00) is Theorem.T3


def test_report_dict_roundtrip():
    rep = bounds.bounds(SuperpositionInput(H, H, BELL, KET01))
    d = rep.to_dict()
    assert d["theorem"] == "T2"
    assert d["upper_individual"] == list(rep.upper_individual)


def test_beta_zero_gives_exact_lower():
    rng = generators.make_rng(1)
    cfg = generators.GeneratorConfig(1, 3, 4)
    psi, phi = generators.biorthogonal_pair(cfg, rng)
    rep = bounds.theorem1_bounds(SuperpositionInput(1.0, 0.0, psi, phi))
    assert abs(rep.lower_individual[0] - rep.actual_concurrence) < 1e-10


# -- randomized sandwich properties ----------------------------------------

dims = st.sampled_from([(2, 2), (2, 4), (3, 4), (3, 6), (4, 4)])


@settings(max_examples=80, deadline=None)
@given(dims, seeds)
def test_t1_sandwich(d, seed):
    cfg = generators.GeneratorConfig(seed, *d)
    rng = cfg.rng(0)
    psi, phi = generators.biorthogonal_pair(cfg, rng)
    alpha, beta = generators.random_amplitudes(cfg, rng)
    rep = bounds.theorem1_bounds(SuperpositionInput(alpha, beta, psi, phi))
    assert_chain(rep)
    assert max(rep.lower_individual) <= rep.actual_concurrence + TOL
    assert rep.actual_concurrence <= min(rep.upper_individual) + TOL


@settings(max_examples=80, deadline=None)
@given(dims, seeds)
def test_t2_sandwich(d, seed):
    cfg = generators.GeneratorConfig(seed, *d)
    rng = cfg.rng(0)
    psi, phi = generators.orthogonal_pair(cfg, rng)
    alpha, beta = generators.random_amplitudes(cfg, rng)
    rep = bounds.theorem2_bounds(SuperpositionInput(alpha, beta, psi, phi))
    assert_chain(rep)
    if rep.lower_combined > TOL:
        assert rep.condition_flag


@settings(max_examples=80, deadline=None)
@given(dims, seeds)
def test_t3_matches_t2_on_orthogonal_pairs(d, seed):
    cfg = generators.GeneratorConfig(seed, *d)
    rng = cfg.rng(0)
    psi, phi = generators.orthogonal_pair(cfg, rng)
    alpha, beta = generators.random_amplitudes(cfg, rng)
    inp = SuperpositionInput(alpha, beta, psi, phi)
    r2, r3 = bounds.theorem2_bounds(inp), bounds.theorem3_bounds(inp)
    np.testing.assert_allclose(r3.chain(), r2.chain(), atol=1e-10)
    np.testing.assert_allclose(r3.lower_individual, r2.lower_individual, atol=1e-10)
    np.testing.assert_allclose(r3.upper_individual, r2.upper_individual, atol=1e-10)


@settings(max_examples=80, deadline=None)
@given(dims, seeds)
def test_t3_upper_bound(d, seed):
    cfg = generators.GeneratorConfig(seed, *d)
    rng = cfg.rng(0)
    psi = generators.haar_state(cfg, rng)
    phi = generators.haar_state(cfg, rng)
    alpha, beta = generators.random_amplitudes(cfg, rng)
    rep = bounds.theorem3_bounds(SuperpositionInput(alpha, beta, psi, phi))
    assert rep.actual_concurrence <= rep.upper_combined + TOL
    assert rep.upper_combined <= rep.upper_symmetric + TOL
    assert rep.lower_symmetric <= rep.lower_combined + TOL


@settings(max_examples=40, deadline=None)
@given(seeds, st.floats(0.0, 2 * math.pi))
def test_global_phase_of_pair_irrelevant(seed, theta):
    cfg = generators.GeneratorConfig(seed, 3, 4)
    psi, phi = generators.orthogonal_pair(cfg)
    a = SuperpositionInput.from_alpha_sq(0.6, psi, phi, phase=0.3)
    phase = complex(math.cos(theta), math.sin(theta))
    b = SuperpositionInput(a.alpha * phase, a.beta * phase, psi, phi)
    np.testing.assert_allclose(bounds.theorem2_bounds(a).chain(), bounds.theorem2_bounds(b).chain(),
                               atol=1e-12)
