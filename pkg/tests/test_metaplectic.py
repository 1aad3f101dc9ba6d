import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nctorus.gaussian import FunctionState, fourier, l2_distance, l2_inner, l2_norm, translate, modulate
from nctorus.metaplectic import (MetaplecticOp, apply, chirp_op, compose, equivariant_group_element, fourier_op,
                                 free_op, hexic, hexic_general, identity, inverse, lift_symplectic,
                                 op_for_lattice_matrix, operator_order, power, probe_states, projection,
                                 scalar_lift, sub_op)
from nctorus.symplectic import standard_J, symplectic_residual


def _covers(op, M, rng, tol=1e-10):
    """``op rho(v) op^-1 = rho(M v)`` on a random atom, for random shifts ``v``."""
    m = op.m
    f = FunctionState.random(rng, m, 0, 2)
    for _ in range(3):
        v = rng.normal(size=2 * m)
        w = M @ v

        def rho(g, z):
            a, xi = z[:m], z[m:]
            return modulate(translate(g, a), xi) * complex(np.exp(-1j * np.pi * a @ xi))

        lhs = apply(op, rho(f, v))
        rhs = rho(apply(op, f), w)
        assert l2_distance(lhs, rhs) / l2_norm(f) <= tol


def test_hexic_order_six():
    probes = probe_states(1, 10)
    rep = operator_order(hexic(1), 6, probes, report=True)
    assert abs(rep.lam + 1) <= 1e-9
    assert rep.spread <= 1e-9
    lifted = scalar_lift(hexic(1), 6, probes)
    assert abs(operator_order(lifted, 6, probes) - 1) <= 1e-9


def test_hexic_kernel_pointwise():
    f = FunctionState.gaussian(1)
    xs = np.linspace(-6, 6, 4001)
    h = xs[1] - xs[0]
    for x in (-0.7, 0.0, 0.4):
        quad = np.sum(np.exp(2j * np.pi * (x * xs - 0.5 * xs ** 2)) * f.evaluate(xs[:, None])) * h
        assert apply(hexic(1), f).evaluate(np.array([[x]]))[0] == pytest.approx(np.exp(1j * np.pi / 4) * quad,
                                                                                abs=1e-10)


@pytest.mark.parametrize("theta12", [0.3, 0.5, (np.sqrt(5) - 1) / 2, 0.9])
def test_hexic_general_order_six(theta12):
    op = hexic_general(theta12)
    assert np.allclose(projection(op), [[1, -theta12], [1 / theta12, 0]])
    rep = operator_order(op, 6, probe_states(1, 10), report=True)
    assert abs(rep.lam - 1) <= 1e-9
    assert rep.residual <= 1e-9


def test_hexic_general_at_one_is_scaled_hexic(rng):
    f = FunctionState.random(rng, 1, 0, 2)
    lhs = apply(hexic_general(1.0), f)
    rhs = apply(hexic(1), f) * complex(np.exp(-1j * np.pi / 6))
    assert l2_distance(lhs, rhs) <= 1e-12


def test_hexic_general_rejects():
    with pytest.raises(ValueError):
        hexic_general(0.0)


@pytest.mark.parametrize("m", [1, 2])
def test_step_operators_cover_their_matrices(m, rng):
    L = np.eye(m) + np.triu(np.ones((m, m)), 1) * 0.5
    P = np.eye(m) * 0.7
    for op in (fourier_op(m), sub_op(L), chirp_op(P)):
        _covers(op, projection(op), rng)
    assert np.allclose(projection(fourier_op(m)), standard_J(m))


def test_fourier_op_matches_transform(rng):
    f = FunctionState.random(rng, 2, 0, 2)
    assert l2_distance(apply(fourier_op(2), f), fourier(f)) == 0.0


def test_free_op_covers(rng):
    op = free_op(1.0, 2.0, 0.0, 1.0)
    _covers(op, projection(op), rng)
    M = np.block([[np.eye(2), np.diag([1.0, 2.0])], [np.zeros((2, 2)), np.eye(2)]])
    _covers(free_op(M[:2, :2], M[:2, 2:], M[2:, :2], M[2:, 2:]), M, rng)


def test_free_op_unitary(rng):
    f = FunctionState.random(rng, 1, 0, 2)
    assert l2_norm(apply(hexic(1), f)) == pytest.approx(l2_norm(f), rel=1e-12)


def test_composition_and_inverse(rng):
    f = FunctionState.random(rng, 1, 0, 2)
    ops = [hexic(1), fourier_op(1), sub_op([[2.0]]), chirp_op([[0.3]]), hexic_general(0.4)]
    for op in ops:
        assert l2_distance(apply(compose(inverse(op), op), f), f) / l2_norm(f) <= 1e-10
        assert l2_distance(apply(compose(op, inverse(op)), f), f) / l2_norm(f) <= 1e-10
    a, b = ops[0], ops[3]
    assert l2_distance(apply(compose(a, b), f), apply(a, apply(b, f))) <= 1e-12
    assert np.allclose(projection(compose(a, b)), projection(a) @ projection(b))
    assert l2_distance(apply(power(a, -2), apply(power(a, 2), f)), f) / l2_norm(f) <= 1e-10
    assert l2_distance(apply(identity(1), f), f) == 0.0


def test_fourier_order_four():
    assert abs(operator_order(fourier_op(1), 4) - 1) <= 1e-9


def test_operator_order_rejects_wrong_order():
    with pytest.raises(ArithmeticError):
        operator_order(hexic(1), 4)
    with pytest.raises(ValueError):
        operator_order(hexic(1), 6, probe_states(1, 3))


def test_json_roundtrip(rng):
    op = compose(hexic(1), compose(sub_op([[2.0]]), chirp_op([[0.3]]))) * 1j
    back = MetaplecticOp.from_json(op.to_json())
    f = FunctionState.random(rng, 1, 0, 2)
    assert l2_distance(apply(op, f), apply(back, f)) == 0.0


def _random_symplectic(rng, m):
    A = rng.normal(size=(m, m))
    B = rng.normal(size=(m, m))
    P, Q = A + A.T, B + B.T
    I = np.eye(m)
    lower = np.block([[I, np.zeros((m, m))], [P, I]])
    upper = np.block([[I, Q], [np.zeros((m, m)), I]])
    L = np.eye(m) + 0.3 * rng.normal(size=(m, m))
    dil = np.block([[np.linalg.inv(L), np.zeros((m, m))], [np.zeros((m, m)), L.T]])
    return lower @ upper @ dil


@settings(max_examples=10)
@given(seed=st.integers(0, 10 ** 6))
def test_lift_symplectic_covers(seed):
    rng = np.random.default_rng(seed)
    M = _random_symplectic(rng, 1)
    op = lift_symplectic(M)
    assert np.max(np.abs(projection(op) - M)) <= 1e-9 * max(1.0, np.max(np.abs(M))) ** 2


@pytest.mark.parametrize("M", [np.eye(2), -np.eye(2), np.array([[2.0, 0.0], [0.0, 0.5]]), np.eye(4)])
def test_lift_symplectic_non_free(M, rng):
    op = lift_symplectic(M)
    assert np.allclose(projection(op), M)
    _covers(op, M, rng)


def test_lift_symplectic_rejects():
    with pytest.raises(ValueError):
        lift_symplectic(np.diag([2.0, 1.0]))


def test_op_for_lattice_matrix(rng):
    T = np.diag([-0.6, 1.0])
    W = np.array([[0, -1], [1, 1]])
    op = op_for_lattice_matrix(W, T)
    assert np.allclose(equivariant_group_element(op, T), W)
    assert symplectic_residual(projection(op)) <= 1e-10


def test_fourier_word_matches_free_data(rng):
    free = free_op(np.zeros((1, 1)), np.eye(1), -np.eye(1), np.zeros((1, 1)))
    word = fourier_op(1)
    ratios = []
    for _ in range(20):
        f = FunctionState.random(rng, 1, 0, 2)
        a, b = apply(free, f), apply(word, f)
        ratio = l2_inner(a, b) / l2_inner(b, b)
        assert l2_distance(a, b * ratio) / l2_norm(f) <= 1e-10
        ratios.append(ratio)
    assert abs(abs(ratios[0]) - 1) <= 1e-12
    assert np.var(ratios) <= 1e-10
