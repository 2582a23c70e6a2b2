import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confluent_arnoldi import complex_extension as cx
from confluent_arnoldi import eigenproblems as eig
from confluent_arnoldi.arnoldi_core import confluent_arnoldi
from confluent_arnoldi.experiments import sloshing_modes


def random_pencil(rng, M, p):
    """Consistent pencil A = B S diag(lam) S^-1 with known real spectrum."""
    B = rng.standard_normal((M, p))
    lam = np.sort(rng.uniform(-5, 5, p))
    S = np.eye(p) + 0.3 * rng.standard_normal((p, p))
    return B @ S @ np.diag(lam) @ np.linalg.inv(S), B, lam


def assert_residual_bound(problem, pairs, tol=1e-8):
    nA, nB = np.linalg.norm(problem.A, 2), np.linalg.norm(problem.B, 2)
    for lam, v in zip(pairs.lambdas, pairs.vectors.T):
        r = np.linalg.norm(problem.A @ v - lam * (problem.B @ v))
        assert r <= tol * (nA + abs(lam) * nB) * np.linalg.norm(v)


def test_identity_pencil():
    B = np.random.default_rng(0).standard_normal((10, 4))
    pairs = eig.rect_eig_qr(eig.RectGEVP(B.copy(), B))
    np.testing.assert_allclose(pairs.lambdas, 1, atol=1e-12)
    assert len(pairs) == 4


def test_diagonal_construction_recovers_lambda():
    rng = np.random.default_rng(1)
    B = rng.standard_normal((20, 5))
    A = B @ np.diag([1.0, 2, 3, 4, 5])
    for solver in (eig.rect_eig_qr, eig.rect_eig_svd):
        pairs = solver(eig.RectGEVP(A, B))
        np.testing.assert_allclose(pairs.lambdas, [1, 2, 3, 4, 5], atol=1e-10)
        # eigenvectors are the unit vectors up to scale
        V = pairs.vectors / np.abs(pairs.vectors).max(axis=0)
        np.testing.assert_allclose(np.abs(V), np.eye(5), atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), M=st.integers(20, 100), p=st.integers(1, 20))
def test_qr_and_svd_agree(seed, M, p):
    rng = np.random.default_rng(seed)
    A, B, lam = random_pencil(rng, M, p)
    prob = eig.RectGEVP(A, B)
    q = eig.rect_eig_qr(prob)
    s = eig.rect_eig_svd(prob)
    assert len(q) == len(s) == p
    np.testing.assert_allclose(q.lambdas, s.lambdas, atol=1e-8)
    np.testing.assert_allclose(q.lambdas, lam, atol=1e-8)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), M=st.integers(20, 100), p=st.integers(1, 20))
def test_residual_bound(seed, M, p):
    rng = np.random.default_rng(seed)
    A, B, _ = random_pencil(rng, M, p)
    A = A + 1e-6 * rng.standard_normal((M, p))  # inconsistent: residuals no longer zero
    prob = eig.RectGEVP(A, B)
    for pairs in (eig.rect_eig_qr(prob), eig.rect_eig_svd(prob)):
        assert_residual_bound(prob, pairs)
        assert np.all(np.diff(pairs.lambdas) >= 0)
        assert np.all(np.isfinite(pairs.residuals))


def test_zero_b_gives_nothing():
    A = np.random.default_rng(2).standard_normal((12, 4))
    pairs = eig.rect_eig_svd(eig.RectGEVP(A, np.zeros_like(A)))
    assert len(pairs) == 0
    with pytest.raises(eig.RankDeficientError):
        eig.rect_eig_qr(eig.RectGEVP(A, np.zeros_like(A)))


def test_keep_too_large():
    A = np.ones((3, 2))
    with pytest.raises(ValueError):
        eig.rect_eig_svd(eig.RectGEVP(A, A), keep=4)


def test_shape_validation():
    with pytest.raises(ValueError):
        eig.RectGEVP(np.ones((3, 2)), np.ones((3, 1)))
    with pytest.raises(ValueError):
        eig.RectGEVP(np.ones((2, 3)), np.ones((2, 3)))


def test_zero_normal_gives_zero_spectrum():
    c = cx.circle(40)
    basis = confluent_arnoldi(c.z, 1, 5)
    prob = eig.steklov_assemble(basis, c, normal=np.zeros(40))
    assert not prob.A.any()
    pairs = eig.solve(prob)
    np.testing.assert_array_equal(pairs.lambdas, 0)
    assert len(pairs) == 11


def test_disk_degree_one():
    c = cx.circle(30)
    pairs = eig.solve(eig.steklov_assemble(confluent_arnoldi(c.z, 1, 1), c))
    np.testing.assert_allclose(pairs.lambdas, [0, 1, 1], atol=1e-12)


@pytest.mark.parametrize("n", [12, 20])
@pytest.mark.parametrize("order", [0, 1])
def test_disk_spectrum(n, order):
    c = cx.circle(10 * n + 1)
    prob = eig.steklov_assemble(confluent_arnoldi(c.z, order, n), c)
    expected = np.concatenate([[0], np.repeat(np.arange(1, n + 1), 2)])
    for pairs in (eig.rect_eig_qr(prob), eig.rect_eig_svd(prob)):
        np.testing.assert_allclose(pairs.lambdas, expected, atol=1e-8)
        assert_residual_bound(prob, pairs)


def test_disk_eigenfunctions_are_harmonic_modes():
    c = cx.circle(121)
    basis = confluent_arnoldi(c.z, 1, 12)
    pairs = eig.solve(eig.steklov_assemble(basis, c))
    t = np.linspace(0, 2 * np.pi, 50, endpoint=False)
    u = eig.eigenfunction_values(basis.h, pairs.vectors[:, 0], np.exp(1j * t))
    assert np.ptp(u) <= 1e-10 * np.abs(u).max()
    # the lambda=1 pair spans cos t and sin t
    U = np.column_stack([eig.eigenfunction_values(basis.h, pairs.vectors[:, k], np.exp(1j * t))
                         for k in (1, 2)])
    F = np.column_stack([np.cos(t), np.sin(t)])
    P = F @ np.linalg.pinv(F)
    assert np.abs(U - P @ U).max() <= 1e-9 * np.abs(U).max()


def test_beta_sign_convention():
    beta = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    np.testing.assert_array_equal(eig.beta_to_coefficients(beta), [1, 2 - 4j, 3 - 5j])


def test_normalization_and_error_metric():
    u = np.array([0.5, -2.0, 1.0])
    np.testing.assert_array_equal(eig.normalize_max(u), [-0.25, 1.0, -0.5])
    assert eig.eigenfunction_error(-3 * u, u) == 0


def test_sloshing_eigenvalue_formula():
    assert abs(eig.sloshing_eigenvalue(1) - np.pi * np.tanh(np.pi)) <= 1e-15
    assert abs(eig.sloshing_eigenvalue(1) - 3.129881) <= 1e-6
    assert eig.sloshing_eigenvalue(0) == 0


def test_sloshing_assemble_masks_b():
    sq = cx.unit_square(400)
    top = cx.side_mask(sq, "top")
    prob = eig.sloshing_assemble(confluent_arnoldi(sq.z, 1, 20), sq, top)
    assert prob.reduction == "svd" and prob.keep == 41
    assert not prob.B[~top].any()
    pairs = eig.solve(prob, tol=None)
    np.testing.assert_allclose(pairs.lambdas[:3], [eig.sloshing_eigenvalue(k) for k in range(3)],
                               rtol=1e-3, atol=1e-6)
    with pytest.raises(ValueError):
        eig.sloshing_assemble(confluent_arnoldi(sq.z, 1, 20), sq, np.zeros(sq.m, bool))


def test_sloshing_converges():
    errs = [sloshing_modes(n, 20 * (n + 1), modes=(5,))[0][0] for n in (10, 20, 30)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] <= 1e-8
