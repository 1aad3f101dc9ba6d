import numpy as np
import pytest

from nctorus.algebra import SkewMatrix
from nctorus.equivariance import (W3, W4, W6, check_change_of_frame, check_flip_extension, check_inner_compat,
                                  flip_case, general_cases, main_identity_residual, metaplectic_case, proof_replay,
                                  run_case, standard_context)
from nctorus.gaussian import FunctionState
from nctorus.metaplectic import hexic, hexic_general
from nctorus.module import module_context


@pytest.mark.parametrize("m", [1, 2])
def test_proof_replay(m):
    checks = proof_replay(m, n_probes=4)
    assert len(checks) == 6
    for c in checks:
        assert c.passed, (c.id, c.residual)


def test_hexic_intertwines_standard_theta(rng):
    ctx = standard_context(1)
    probes = [FunctionState.random(rng, 1, 0, 2) for _ in range(4)]
    case = metaplectic_case("hexic", ctx, W6, probes)
    for c in run_case(case):
        assert c.passed, (c.id, c.residual)


@pytest.mark.parametrize("theta12", [0.3, (np.sqrt(5) - 1) / 2])
def test_hexic_general_intertwines(theta12, rng):
    th = SkewMatrix(np.array([[0.0, -theta12], [theta12, 0.0]]))
    ctx = module_context(th, 1, T11=np.diag([-theta12, 1.0]))
    probes = [FunctionState.random(rng, 1, 0, 2) for _ in range(4)]
    case = metaplectic_case("hexic-general", ctx, W6, probes, op=hexic_general(theta12))
    for l in ([1, 0], [0, 1], [2, -1]):
        assert main_identity_residual(case, l) <= 1e-10


@pytest.mark.parametrize("W", [W3, W4, W6, -np.eye(2)], ids=["W3", "W4", "W6", "flip"])
def test_finite_order_matrices(W, theta2d, rng):
    ctx = module_context(theta2d, 1)
    probes = [FunctionState.random(rng, 1, 0, 2) for _ in range(4)]
    case = metaplectic_case("w", ctx, W, probes)
    for c in run_case(case):
        assert c.passed, (c.id, c.residual)


def test_general_cases_small():
    cases = general_cases(n_theta=1, n_probes=2, seed=3)
    assert len(cases) == 6
    for case in cases:
        for c in run_case(case, window=False):
            assert c.passed, (c.id, c.residual)


@pytest.mark.parametrize("name,p,q", [("theta2d", 1, 0), ("theta3d", 1, 1)])
def test_flip_extension(name, p, q):
    from nctorus.suites import load_theta
    c = check_flip_extension(load_theta(name)[0], p, q, radius=2)
    assert c.passed, c.residual


def test_flip_case_inner_compat(theta3d, rng):
    ctx = module_context(theta3d, 1, 1)
    probes = [FunctionState.random(rng, 1, 1, 2) for _ in range(2)]
    for c in check_inner_compat(flip_case("flip", ctx, probes, 1e-10)):
        assert c.passed, (c.id, c.residual)


def test_rejects_non_symplectic_matrix(theta2d):
    ctx = module_context(theta2d, 1)
    with pytest.raises(ValueError):
        metaplectic_case("bad", ctx, np.diag([2, 1]), [FunctionState.gaussian(1)])


def test_rejects_mismatched_operator(theta2d):
    ctx = module_context(theta2d, 1)
    with pytest.raises(ValueError):
        metaplectic_case("bad", ctx, W4, [FunctionState.gaussian(1)], op=hexic(1))


def test_change_of_frame_needs_q0(theta3d):
    ctx = module_context(theta3d, 1, 1)
    case = flip_case("flip", ctx, [FunctionState.gaussian(1, 1)])
    with pytest.raises(ValueError):
        check_change_of_frame(case, [1, 0, 0])


def test_wrong_operator_fails_detectably(theta2d, rng):
    ctx = module_context(theta2d, 1)
    probes = [FunctionState.random(rng, 1, 0, 2) for _ in range(2)]
    case = metaplectic_case("w4", ctx, W4, probes)
    case.W_theta = -np.eye(2, dtype=np.int64)
    assert main_identity_residual(case, [1, 0]) > 1e-3


def test_flip_extension_commutative_torus():
    c = check_flip_extension(SkewMatrix(np.zeros((2, 2))), 0, 2, radius=2)
    assert c.passed, c.residual
