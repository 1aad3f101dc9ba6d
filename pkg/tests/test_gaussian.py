import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nctorus.gaussian import (FunctionState, UnderResolvedGrid, chirp, conjugate, fourier, grid_oracle_eval,
                              grid_oracle_fourier, grid_oracle_inner, l2_distance, l2_inner, l2_norm, modulate,
                              reflect, sqrt_det, substitute, translate)

small = st.floats(-1.5, 1.5, allow_nan=False)


def test_standard_gaussian_norm():
    f = FunctionState.gaussian(1)
    assert l2_norm(f) ** 2 == pytest.approx(1 / np.sqrt(2), abs=1e-14)
    f2 = FunctionState.gaussian(2)
    assert l2_norm(f2) ** 2 == pytest.approx(0.5, abs=1e-14)


def test_fourier_fixes_standard_gaussian():
    f = FunctionState.gaussian(1)
    assert l2_distance(fourier(f), f) <= 1e-13
    g = FunctionState.gaussian(3)
    assert l2_distance(fourier(g), g) <= 1e-13


@pytest.mark.parametrize("p", [1, 2])
def test_fourier_four_times_is_identity(p, rng):
    f = FunctionState.random(rng, p, 0, 2)
    g = fourier(fourier(fourier(fourier(f))))
    assert l2_distance(g, f) / l2_norm(f) <= 1e-12
    assert l2_distance(fourier(fourier(f)), reflect(f)) / l2_norm(f) <= 1e-12


@pytest.mark.parametrize("p", [1, 2])
def test_plancherel(p, rng):
    f, g = FunctionState.random(rng, p, 0, 2), FunctionState.random(rng, p, 0, 2)
    assert abs(l2_inner(fourier(f), fourier(g)) - l2_inner(f, g)) <= 1e-12 * l2_norm(f) * l2_norm(g)


def test_fourier_against_grid(rng):
    f = FunctionState.random(rng, 1, 0, 2)
    freqs, spec = grid_oracle_fourier(f, radius=10.0, n=2048)
    mask = np.abs(freqs) < 3
    exact = fourier(f).evaluate(freqs[mask][:, None])
    assert np.max(np.abs(exact - spec[mask])) <= 1e-9


@given(v=small, xi=small)
def test_translate_modulate_pointwise(v, xi):
    f = FunctionState.random(np.random.default_rng(5), 1, 0, 2)
    x = np.linspace(-2, 2, 9)[:, None]
    assert np.allclose(translate(f, [v]).evaluate(x), f.evaluate(x - v), atol=1e-12)
    assert np.allclose(modulate(f, [xi]).evaluate(x), f.evaluate(x) * np.exp(2j * np.pi * x[:, 0] * xi), atol=1e-12)


def test_chirp_substitute_conjugate_pointwise(rng):
    f = FunctionState.random(rng, 2, 0, 2)
    x = rng.normal(size=(7, 2))
    P = np.array([[0.4, 0.1], [0.1, -0.3]])
    L = np.array([[1.0, 0.5], [-0.2, 2.0]])
    quad = np.einsum("ki,ij,kj->k", x, P, x)
    assert np.allclose(chirp(f, P).evaluate(x), f.evaluate(x) * np.exp(1j * np.pi * quad), atol=1e-12)
    assert np.allclose(substitute(f, L).evaluate(x), np.sqrt(np.linalg.det(L)) * f.evaluate(x @ L.T), atol=1e-12)
    assert np.allclose(conjugate(f).evaluate(x), np.conj(f.evaluate(x)), atol=1e-12)


def test_substitute_is_unitary(rng):
    f = FunctionState.random(rng, 2, 0, 2)
    L = np.array([[1.0, 0.5], [-0.2, 2.0]])
    assert l2_norm(substitute(f, L)) == pytest.approx(l2_norm(f), rel=1e-12)
    with pytest.raises(ValueError):
        substitute(f, np.zeros((2, 2)))


def test_inner_against_grid(rng):
    f, g = FunctionState.random(rng, 1, 1, 2), FunctionState.random(rng, 1, 1, 2)
    assert abs(l2_inner(f, g) - grid_oracle_inner(f, g, radius=10.0, n=2048)) <= 1e-9


def test_lattice_part():
    f = FunctionState.gaussian(1, 1, t0=[2])
    x = np.zeros((1, 1))
    assert f.evaluate(x, [2])[0] == pytest.approx(1.0)
    assert f.evaluate(x, [1])[0] == 0
    g = translate(f, [0.0], [-2])
    assert g.evaluate(x, [0])[0] == pytest.approx(1.0)
    assert l2_inner(f, FunctionState.gaussian(1, 1, t0=[0])) == 0


def test_sqrt_det_branch(rng):
    for _ in range(10):
        f = FunctionState.random(rng, 2, 0, 1)
        X = -1j * f.M[0]
        val = sqrt_det(X)
        assert val ** 2 == pytest.approx(np.linalg.det(X), rel=1e-12)
        assert val.real > 0


def test_validation():
    with pytest.raises(ValueError):
        FunctionState([1.0], np.array([[[-1j]]]), np.zeros((1, 1)), np.zeros((1, 0)))
    with pytest.raises(ValueError):
        fourier(FunctionState.gaussian(1, 1))
    with pytest.raises(ValueError):
        l2_inner(FunctionState.gaussian(1), FunctionState.gaussian(2))


def test_under_resolved_grid():
    f = FunctionState.gaussian(1, width=0.01)
    with pytest.raises(UnderResolvedGrid):
        grid_oracle_eval(f, radius=8.0, n=256)


def test_json_roundtrip(rng):
    f = FunctionState.random(rng, 2, 1, 3)
    g = FunctionState.from_json(f.to_json())
    assert l2_distance(f, g) == 0.0
