import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nctorus.algebra import SkewMatrix, random_skew
from nctorus.symplectic import (FreeSymplectic, build_embedding, check_theta_symplectic, conjugate_to_standard,
                                factor_skew, generating_function, load_matrix_fixture, standard_J,
                                symplectic_residual, theta_prime)

reals = st.floats(-3, 3, allow_nan=False)


def test_theta_prime_standard():
    J0 = standard_J(1)
    th = SkewMatrix(J0)
    assert np.allclose(theta_prime(th, 1).matrix, np.linalg.inv(J0))
    assert np.allclose(theta_prime(th, 1).matrix, -J0)


def test_theta_prime_fixture(theta3d):
    tp = theta_prime(theta3d, 1).matrix
    assert np.max(np.abs(tp + tp.T)) <= 1e-12


def test_theta_prime_block_diagonal(rng):
    th = np.zeros((4, 4))
    th[:2, :2] = [[0, 0.7], [-0.7, 0]]
    tp = theta_prime(SkewMatrix(th), 1).matrix
    expected = np.zeros((4, 4))
    expected[:2, :2] = np.linalg.inv(th[:2, :2])
    assert np.allclose(tp, expected)


def test_theta_prime_singular():
    th = SkewMatrix(np.zeros((3, 3)))
    with pytest.raises(np.linalg.LinAlgError):
        theta_prime(th, 1)


@pytest.mark.parametrize("n", [2, 4, 6])
def test_factorization_roundtrip(n, rng):
    for _ in range(5):
        th = random_skew(n, rng).matrix
        T11 = factor_skew(th)
        assert np.max(np.abs(T11.T @ standard_J(n // 2) @ T11 - th)) <= 1e-10


@pytest.mark.parametrize("p,q", [(1, 0), (1, 1), (2, 0), (1, 2), (2, 1)])
def test_embedding_layout(p, q, rng):
    th = random_skew(2 * p + q, rng)
    ctx = build_embedding(th, p, q)
    k = 2 * p
    t = th.matrix
    assert np.max(np.abs(ctx.T11.T @ standard_J(p) @ ctx.T11 - t[:k, :k])) <= 1e-10
    assert np.array_equal(ctx.T[k + q:, :k], t[k:, :k])
    assert np.array_equal(ctx.T[k + q:, k:], np.triu(t[k:, k:]))
    assert np.array_equal(ctx.T[k:k + q, k:], np.eye(q))
    assert np.array_equal(ctx.Jprime, np.where(ctx.J < 0, 0, ctx.J))
    # T^T J T recovers theta up to the integer-valued lattice part
    M = ctx.T.T @ ctx.J @ ctx.T
    assert np.max(np.abs((M - M.T) / 2 - t)) <= 1e-10


def test_embedding_hexic_choice():
    th = SkewMatrix(np.array([[0.0, -0.4], [0.4, 0.0]]))
    ctx = build_embedding(th, 1, T11=np.diag([-0.4, 1.0]))
    assert np.allclose(ctx.T, np.diag([-0.4, 1.0]))
    with pytest.raises(ValueError):
        build_embedding(th, 1, T11=np.eye(2))


def test_embedding_minus_J():
    th = SkewMatrix(-standard_J(2))
    T11 = np.diag([-1.0, -1.0, 1.0, 1.0])
    ctx = build_embedding(th, 2, T11=T11)
    assert np.allclose(ctx.T, T11)


def test_embedding_bad_dimensions(theta3d):
    with pytest.raises(ValueError):
        build_embedding(theta3d, 2, 1)


def test_theta_symplectic_checks(theta2d, rng):
    assert check_theta_symplectic(-np.eye(2), theta2d)[0]
    assert check_theta_symplectic(load_matrix_fixture("W6"), theta2d)[0]
    assert not check_theta_symplectic(np.diag([2, 1]), theta2d)[0]
    th = random_skew(5, rng)
    assert check_theta_symplectic(-np.eye(5), th)[0]


def test_generating_function_examples():
    hexic = FreeSymplectic(1, -1, 1, 0, 1)
    assert generating_function(hexic, 0.3, 0.7) == pytest.approx(0.3 * 0.7 - 0.5 * 0.49)
    J = FreeSymplectic(np.zeros((2, 2)), np.eye(2), -np.eye(2), np.zeros((2, 2)), 0)
    x, xp = np.array([0.2, -1.0]), np.array([0.5, 0.3])
    assert generating_function(J, x, xp) == pytest.approx(-x @ xp)


@given(a=reals, b=reals, x=reals, xp=reals)
def test_generating_function_terms(a, b, x, xp):
    B = 1.0 + abs(b)
    A, D = a, 0.5
    C = (A * D - 1) / B
    fs = FreeSymplectic(A, B, C, D, 0)
    expect = 0.5 * D / B * x * x - x * xp / B + 0.5 * A / B * xp * xp
    assert generating_function(fs, x, xp) == pytest.approx(expect, abs=1e-12)


def test_generating_function_hessian(rng):
    P = np.array([[0.3, 0.1], [0.1, 0.2]])
    Q = np.array([[2.0, 1.0], [1.0, 1.5]])
    I = np.eye(2)
    M = FreeSymplectic.from_matrix(np.block([[I, Q], [P, I + P @ Q]]))
    Binv = np.linalg.inv(M.B)
    H = np.block([[M.D @ Binv, -Binv.T], [-Binv, Binv @ M.A]])
    H = 0.5 * (H + H.T)
    z0 = rng.normal(size=4)
    h = 1e-3
    num = np.zeros((4, 4))
    f = lambda z: generating_function(M, z[:2], z[2:])
    for i in range(4):
        for j in range(4):
            ei, ej = np.eye(4)[i] * h, np.eye(4)[j] * h
            num[i, j] = (f(z0 + ei + ej) - f(z0 + ei - ej) - f(z0 - ei + ej) + f(z0 - ei - ej)) / (4 * h * h)
    assert np.max(np.abs(num - H)) <= 1e-6


def test_free_symplectic_validation():
    with pytest.raises(ValueError):
        FreeSymplectic(1, 0, 0, 1, 0)
    with pytest.raises(ValueError):
        FreeSymplectic(1, 1, 0, 2, 0)
    with pytest.raises(ValueError):
        FreeSymplectic(1, -1, 1, 0, 0)


@pytest.mark.parametrize("name", ["W2", "W3", "W4", "W6"])
def test_conjugate_to_standard(name, theta2d):
    ctx = build_embedding(theta2d, 1)
    W = conjugate_to_standard(load_matrix_fixture(name), ctx)
    assert symplectic_residual(W) <= 1e-10


def test_conjugate_to_standard_trivial(rng):
    ctx = build_embedding(random_skew(4, rng), 2)
    assert np.allclose(conjugate_to_standard(-np.eye(4), ctx), -np.eye(4))
    ctx_J = build_embedding(SkewMatrix(standard_J(1)), 1, T11=np.eye(2))
    assert np.allclose(conjugate_to_standard(load_matrix_fixture("W4"), ctx_J), load_matrix_fixture("W4"))


def test_conjugate_to_standard_rejects(theta3d, theta2d):
    with pytest.raises(ValueError):
        conjugate_to_standard(-np.eye(3), build_embedding(theta3d, 1))
    with pytest.raises(ValueError):
        conjugate_to_standard(np.diag([2, 1]), build_embedding(theta2d, 1))
