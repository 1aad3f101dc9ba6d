import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nctorus.algebra import (AlgebraElement, Convention, FiniteCyclicAction, OrbifoldElement, SkewMatrix,
                             build_action, cocycle_value, random_element, random_skew)
from nctorus.suites import _fixture_matrix

TOL = 1e-12
lattice3 = st.lists(st.integers(-6, 6), min_size=3, max_size=3)


def U(theta, i, conv=Convention.PRESENTATION, k=1):
    return AlgebraElement.generator(theta, i, conv, k)


def test_skew_matrix_mirrors_upper_triangle():
    th = SkewMatrix([[0, 0.3], [-0.3, 0]])
    assert np.array_equal(th.matrix, -th.matrix.T)
    with pytest.raises(ValueError):
        SkewMatrix([[0, 1], [0.5, 0]])
    with pytest.raises(ValueError):
        SkewMatrix(np.zeros((2, 3)))


@pytest.mark.parametrize("conv", list(Convention))
@given(x=lattice3, y=lattice3, z=lattice3)
def test_cocycle_identity(conv, x, y, z, theta3d):
    x, y, z = map(np.array, (x, y, z))
    lhs = cocycle_value(theta3d, conv, x, y) * cocycle_value(theta3d, conv, x + y, z)
    rhs = cocycle_value(theta3d, conv, x, y + z) * cocycle_value(theta3d, conv, y, z)
    assert abs(lhs - rhs) <= TOL
    assert abs(cocycle_value(theta3d, conv, x, 0 * x) - 1) <= TOL
    assert abs(cocycle_value(theta3d, conv, 0 * x, x) - 1) <= TOL


def test_full_phase_cocycle_value():
    th = SkewMatrix([[0, 0.5], [-0.5, 0]])
    assert abs(cocycle_value(th, Convention.FULL_PHASE, [1, 0], [0, 1]) + 1) <= TOL


def test_cocycle_dimension_mismatch(theta2d):
    with pytest.raises(ValueError):
        cocycle_value(theta2d, Convention.PRESENTATION, [1, 0, 0], [0, 1])


def test_presentation_relation_calibration():
    """Only the presentation convention gives ``U_2 U_1 = e(theta_12) U_1 U_2`` verbatim."""
    th = SkewMatrix.scalar(0.3)
    phase = np.exp(2j * np.pi * 0.3)
    res = {}
    for conv in Convention:
        U1, U2 = U(th, 1, conv), U(th, 2, conv)
        res[conv] = (U2 * U1 - U1 * U2 * phase).max_abs()
    assert res[Convention.PRESENTATION] <= TOL
    assert res[Convention.FULL_PHASE] > 0.1
    assert res[Convention.MODULE] > 0.1


def test_generator_relations_random_theta(rng):
    for _ in range(5):
        th = random_skew(4, rng)
        for j in range(1, 5):
            for k in range(j + 1, 5):
                lhs = U(th, k) * U(th, j)
                rhs = U(th, j) * U(th, k) * np.exp(2j * np.pi * th[j - 1, k - 1])
                assert (lhs - rhs).max_abs() <= TOL


def test_identity_and_unitarity(theta3d, rng):
    a = random_element(theta3d, rng)
    one = AlgebraElement.one(theta3d)
    assert (a * one - a).max_abs() <= TOL
    assert (one * a - a).max_abs() <= TOL
    for i in (1, 2, 3):
        assert (U(theta3d, i).star() * U(theta3d, i) - one).max_abs() <= TOL
    assert (one.star() - one).max_abs() == 0


@pytest.mark.parametrize("conv", list(Convention))
def test_associativity_and_involution(conv, rng):
    th = random_skew(3, rng)
    e1, e2, e3 = (U(th, i, conv) for i in (1, 2, 3))
    assert ((e1 * e2) * e3 - e1 * (e2 * e3)).max_abs() <= TOL
    for _ in range(50):
        a, b, c = (random_element(th, rng, 3, 2, conv) for _ in range(3))
        assert ((a * b) * c - a * (b * c)).max_abs() <= TOL
        assert ((a * b).star() - b.star() * a.star()).max_abs() <= TOL
        assert (a.star().star() - a).max_abs() <= TOL


def test_product_support_in_sumset(theta3d, rng):
    a, b = random_element(theta3d, rng), random_element(theta3d, rng)
    sums = {tuple(np.add(x, y)) for x in a.support() for y in b.support()}
    assert set((a * b).support()) <= sums


def test_trace(theta3d, rng):
    one = AlgebraElement.one(theta3d)
    assert one.trace() == 1
    assert U(theta3d, 1).trace() == 0
    for _ in range(100):
        a, b = random_element(theta3d, rng), random_element(theta3d, rng)
        assert abs((a * b - b * a).trace()) <= TOL
        assert (a.star() * a).trace().real >= -TOL


def test_mismatched_algebras_rejected(theta2d, theta3d):
    with pytest.raises(ValueError):
        U(theta2d, 1) * U(theta3d, 1)
    with pytest.raises(ValueError):
        U(theta2d, 1, Convention.PRESENTATION) * U(theta2d, 1, Convention.MODULE)


def test_element_json_roundtrip(theta3d, rng):
    a = random_element(theta3d, rng)
    b = AlgebraElement.from_json(json.loads(json.dumps(a.to_json())))
    assert (a - b).max_abs() == 0


def test_action_W4_and_flip(theta2d):
    a4 = build_action(FiniteCyclicAction(_fixture_matrix("W4"), theta2d))
    assert (a4(U(theta2d, 1)) - U(theta2d, 2)).max_abs() <= TOL
    assert (a4(U(theta2d, 2)) - U(theta2d, 1, k=-1)).max_abs() <= TOL
    flip = build_action(FiniteCyclicAction(-np.eye(2, dtype=int), theta2d))
    for i in (1, 2):
        assert (flip(U(theta2d, i)) - U(theta2d, i, k=-1)).max_abs() <= TOL


@pytest.mark.parametrize("name", ["W2", "W3", "W4", "W6"])
def test_action_is_star_automorphism(name, theta2d, rng):
    act = FiniteCyclicAction(_fixture_matrix(name), theta2d)
    alpha = build_action(act)
    for _ in range(50):
        a, b = random_element(theta2d, rng), random_element(theta2d, rng)
        assert (alpha(a * b) - alpha(a) * alpha(b)).max_abs() <= TOL
        assert (alpha(a.star()) - alpha(a).star()).max_abs() <= TOL
        assert abs(alpha(a).trace() - a.trace()) <= TOL
        assert (alpha.inverse()(alpha(a)) - a).max_abs() <= TOL
        assert (alpha.power(act.order)(a) - a).max_abs() <= TOL


def test_action_rejects_bad_W(theta2d):
    with pytest.raises(ValueError):
        FiniteCyclicAction(np.diag([2, 1]), theta2d)
    with pytest.raises(ValueError):
        FiniteCyclicAction(np.array([[1, 1], [0, 1]]), theta2d)


def test_flip_crossed_product(theta3d, rng):
    alpha = build_action(FiniteCyclicAction(-np.eye(3, dtype=int), theta3d))
    w = OrbifoldElement.group_unitary(alpha, 2)
    one = OrbifoldElement.group_unitary(alpha, 2, 0)
    assert (w * w - one).max_abs() <= TOL
    for i in (1, 2, 3):
        Ui = OrbifoldElement.from_algebra(alpha, 2, U(theta3d, i))
        Uinv = OrbifoldElement.from_algebra(alpha, 2, U(theta3d, i, k=-1))
        assert (w * Ui * w - Uinv).max_abs() <= TOL
    for _ in range(50):
        x, y, z = (OrbifoldElement(alpha, 2, {g: random_element(theta3d, rng) for g in (0, 1)})
                   for _ in range(3))
        assert ((x * y) * z - x * (y * z)).max_abs() <= TOL
        assert ((x * y).star() - y.star() * x.star()).max_abs() <= TOL
        assert abs((x * y).trace() - (y * x).trace()) <= TOL


def test_order_three_crossed_product(theta2d, rng):
    alpha = build_action(FiniteCyclicAction(_fixture_matrix("W3"), theta2d))
    a = random_element(theta2d, rng)
    w = OrbifoldElement.group_unitary(alpha, 3)
    A = OrbifoldElement.from_algebra(alpha, 3, a)
    assert (w * A * w.star() - OrbifoldElement.from_algebra(alpha, 3, alpha(a))).max_abs() <= TOL
    assert (w * w * w - OrbifoldElement.group_unitary(alpha, 3, 0)).max_abs() <= TOL
