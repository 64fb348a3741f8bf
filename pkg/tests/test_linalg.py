import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superpose import linalg
from superpose.errors import (
    NonFinite,
    NonSquare,
    NotHermitian,
    NotPositiveSemidefinite,
    ShapeMismatch,
    ZeroMatrix,
)


def rand_herm(rng, d):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (g + g.conj().T)


def test_pauli_spectra():
    sx = np.array([[0, 1], [1, 0]])
    sy = np.array([[0, -1j], [1j, 0]])
    sz = np.array([[1, 0], [0, -1]])
    for p in (sx, sy, sz):
        np.testing.assert_allclose(linalg.eigvals_ascending(p), [-1.0, 1.0], atol=1e-15)


def test_real_symmetric_2x2():
    # eigenvalues of [[2,1],[1,2]] are 1 and 3
    vals, vecs = linalg.hermitian_eig([[2.0, 1.0], [1.0, 2.0]])
    np.testing.assert_allclose(vals, [1.0, 3.0], atol=1e-14)
    assert abs(abs(vecs[0, 0]) - 1 / math.sqrt(2)) < 1e-14


def test_diagonal_is_sorted_ascending():
    vals = linalg.eigvals_ascending(np.diag([3.0, -1.0, 2.0]))
    np.testing.assert_array_equal(vals, [-1.0, 2.0, 3.0])


def test_zero_matrix_eig():
    vals, vecs = linalg.hermitian_eig(np.zeros((3, 3)))
    np.testing.assert_array_equal(vals, np.zeros(3))
    np.testing.assert_array_equal(vecs, np.eye(3))


@pytest.mark.parametrize("d", [1, 2, 3, 5, 8])
def test_eig_matches_numpy(d):
    rng = np.random.default_rng(d)
    for _ in range(10):
        h = rand_herm(rng, d)
        vals, vecs = linalg.hermitian_eig(h)
        np.testing.assert_allclose(vals, np.linalg.eigvalsh(h), atol=1e-12)
        # eigenvectors: H V = V diag(vals), V unitary
        np.testing.assert_allclose(h @ vecs, vecs * vals, atol=1e-12)
        np.testing.assert_allclose(vecs.conj().T @ vecs, np.eye(d), atol=1e-12)


def test_degenerate_spectrum():
    rng = np.random.default_rng(3)
    q, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    h = q @ np.diag([1.0, 1.0, 1.0, -2.0]) @ q.conj().T
    np.testing.assert_allclose(linalg.eigvals_ascending(h), [-2.0, 1.0, 1.0, 1.0], atol=1e-13)


def test_eig_rejects_bad_input():
    with pytest.raises(NonSquare):
        linalg.hermitian_eig(np.zeros((2, 3)))
    with pytest.raises(NotHermitian):
        linalg.hermitian_eig([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(NonFinite):
        linalg.hermitian_eig([[np.nan, 0.0], [0.0, 1.0]])


def test_psd_clamp():
    vals = linalg.eigvals_ascending(np.diag([1.0, -1e-15]), psd=True)
    np.testing.assert_array_equal(vals, [0.0, 1.0])
    with pytest.raises(NotPositiveSemidefinite):
        linalg.eigvals_ascending(np.diag([1.0, -1e-3]), psd=True)


def test_upper_triangular_spectrum():
    # (1/2)[[1,1],[0,1]]: Gram matrix (1/4)[[2,1],[1,1]] has eigenvalues (3 -+ sqrt5)/8
    a = 0.5 * np.array([[1.0, 1.0], [0.0, 1.0]])
    lo, hi = (3 - math.sqrt(5)) / 8, (3 + math.sqrt(5)) / 8
    np.testing.assert_allclose(linalg.eigvals_ascending(a @ a.T), [lo, hi], atol=1e-15)
    np.testing.assert_allclose(linalg.singular_values(a), [math.sqrt(hi), math.sqrt(lo)], atol=1e-15)
    assert linalg.numerical_rank(a) == 2


def test_singular_values_known():
    # [[3,0],[4,5]]: singular values sqrt(45), sqrt(5)
    np.testing.assert_allclose(linalg.singular_values([[3.0, 0.0], [4.0, 5.0]]),
                               [math.sqrt(45), math.sqrt(5)], rtol=1e-15)
    s = linalg.singular_values(np.eye(3) / math.sqrt(3))
    np.testing.assert_allclose(s, [1 / math.sqrt(3)] * 3, rtol=1e-15)


@pytest.mark.parametrize("shape", [(2, 2), (2, 5), (5, 2), (4, 6), (6, 6)])
def test_singular_values_match_numpy(shape):
    rng = np.random.default_rng(sum(shape))
    for _ in range(10):
        a = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        s = linalg.singular_values(a)
        ref = np.linalg.svd(a, compute_uv=False)
        assert s.shape == (shape[0],)
        np.testing.assert_allclose(s[: len(ref)], ref, atol=1e-13)
        assert np.all(s[len(ref):] == 0.0)


def test_singular_values_zero_matrix():
    with pytest.raises(ZeroMatrix):
        linalg.singular_values(np.zeros((2, 2)))


def test_small_singular_value_resolved():
    # rank-deficiency must not be blurred by squaring
    a = np.diag([1.0, 1e-10])
    assert abs(linalg.singular_values(a)[1] - 1e-10) < 1e-24


def test_numerical_rank():
    assert linalg.numerical_rank(np.outer([1, 2, 3], [1, 1j])) == 1
    assert linalg.numerical_rank(np.eye(4)) == 4
    assert linalg.numerical_rank(np.diag([1.0, 1e-12])) == 1
    assert linalg.numerical_rank(np.diag([1.0, 1e-6])) == 2


def test_frobenius():
    a = np.array([[1, 2j], [0, -2]])
    assert linalg.frobenius_norm(a) == 3.0
    assert linalg.frobenius_inner(a, a) == 9.0
    with pytest.raises(ShapeMismatch):
        linalg.frobenius_inner(np.eye(2), np.eye(3))


def test_weyl_known_pair():
    h = np.diag([0.0, 1.0])
    k = np.diag([1.0, 0.0])
    # H+K = I: lambda(H)+min(K) = (0,1) <= (1,1) <= (1,2)
    assert linalg.weyl_check(h, k)
    assert linalg.weyl_slack(h, k) == 0.0


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_weyl_random(d, seed):
    rng = np.random.default_rng(seed)
    assert linalg.weyl_check(rand_herm(rng, d), rand_herm(rng, d), tol=1e-10)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_trace_and_unitary_invariance(d, seed):
    rng = np.random.default_rng(seed)
    h = rand_herm(rng, d)
    vals = linalg.eigvals_ascending(h)
    assert abs(vals.sum() - np.trace(h).real) < 1e-12 * max(1.0, np.abs(h).max()) * d
    q, _ = np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
    np.testing.assert_allclose(linalg.eigvals_ascending(q @ h @ q.conj().T), vals, atol=1e-11)
