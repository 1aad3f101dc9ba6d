import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nctorus.algebra import Convention, SkewMatrix
from nctorus.projections import (PROJECTION_TABLE, RieffelData, build_projection, convergence_study,
                                 flip_invariant_variant, projection_trace, rieffel_projection, sg_trace_identity,
                                 smooth_step, smooth_step_pair)

GOLDEN = (np.sqrt(5) - 1) / 2


@pytest.mark.parametrize("i", sorted(PROJECTION_TABLE))
def test_orbifold_projections(i, theta3d):
    P = build_projection(i, theta3d)
    assert P.idempotence_residual <= 1e-12
    assert P.selfadjoint_residual <= 1e-12
    assert abs(projection_trace(P) - 0.5) <= 1e-12


@given(t12=st.floats(0.01, 0.99), t13=st.integers(-2, 2), t23=st.integers(-2, 2))
def test_orbifold_projections_integral_offdiagonal(t12, t13, t23):
    th = SkewMatrix(np.array([[0, t12, t13], [-t12, 0, t23], [-t13, -t23, 0]]))
    for i in PROJECTION_TABLE:
        build_projection(i, th)


@pytest.mark.parametrize("conv", [Convention.FULL_PHASE, Convention.MODULE])
def test_other_conventions_break_P5(conv, theta3d):
    with pytest.raises(ArithmeticError):
        build_projection(5, theta3d, conv)


def test_projection_argument_checks(theta2d, theta3d):
    with pytest.raises(ValueError):
        build_projection(9, theta3d)
    with pytest.raises(ValueError):
        build_projection(1, theta2d)


def test_smooth_step():
    x = np.linspace(-0.5, 1.5, 201)
    s, r = smooth_step_pair(x)
    assert np.all(s[x <= 0] == 0) and np.all(s[x >= 1] == 1)
    assert np.allclose(s + r, 1.0, atol=1e-15)
    assert np.allclose(smooth_step(1 - x), r, atol=1e-15)
    assert np.all(np.diff(s) >= 0)


def test_rieffel_data_validation():
    with pytest.raises(ValueError):
        RieffelData(1.2, 16)
    with pytest.raises(ValueError):
        RieffelData(0.3, 16, eps=0.5)


@pytest.mark.parametrize("theta12", [GOLDEN, 0.3, 0.75])
def test_rieffel_projection(theta12):
    r = rieffel_projection(RieffelData(theta12, 64))
    assert r.idempotence <= 1e-3
    assert r.selfadjoint <= 1e-12
    assert r.trace_error <= 1e-6


def test_rieffel_bound_raises():
    with pytest.raises(ArithmeticError):
        rieffel_projection(RieffelData(GOLDEN, 4), bound=1e-6)


def test_flip_invariant_variant():
    fi = flip_invariant_variant(RieffelData(GOLDEN, 64))
    assert fi.flip_residual <= 1e-10
    assert fi.idempotence <= 1e-3
    assert fi.Sg_idempotence <= 1e-3
    assert abs(GOLDEN - 2 * fi.Sg_trace) <= 2e-3
    assert sg_trace_identity(GOLDEN, fi.Sg_trace) <= 2e-3


def test_convergence_study_is_monotone():
    rows = convergence_study(GOLDEN, (16, 32, 64))
    idem = [row["idempotence"] for row in rows]
    assert idem[0] > idem[1] > idem[2]
    assert all(row["trace_error"] <= 1e-6 for row in rows)
