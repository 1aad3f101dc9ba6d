import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nctorus import toeplitz as tp

GOLDEN = (np.sqrt(5) - 1) / 2


@pytest.fixture(scope="module")
def A():
    return tp.CoefficientAlgebra.flip(GOLDEN)


@given(st.text(alphabet="gs", max_size=12))
def test_reduce_word_is_idempotent_and_reduced(w):
    r = tp.reduce_word(w)
    assert tp.reduce_word(r) == r
    assert "gg" not in r and "ss" not in r
    assert tp.reduce_word(w + w[::-1]) == ""


def test_word_basis_indexing():
    basis = tp.word_basis(4)
    assert basis[:5] == ["", "g", "sg", "gsg", "sgsg"]
    for k, w in enumerate(basis):
        assert tp.in_P(w)
        assert tp.word_index(w) == (k % 2, k // 2)
        assert tp.index_word(*tp.word_index(w)) == w
    with pytest.raises(ValueError):
        tp.word_index("gs")
    with pytest.raises(ValueError):
        tp.reduce_word("gx")


def test_sparse_op_algebra(A, rng):
    a, b = A.random(rng), A.random(rng)
    X = tp.SparseOp(3, {(0, 1): a, (2, 2): b}, A.theta, A.convention)
    I = tp.SparseOp.identity(3, A.theta, A.convention)
    assert (X @ I - X).max_abs() == 0
    assert (X.adjoint().adjoint() - X).max_abs() == 0
    assert ((X + X) - X * 2).max_abs() <= 1e-15
    assert set((X @ X).entries) == {(2, 2)}
    assert X.support() == {0, 1, 2}


@pytest.mark.parametrize("N", [8, 13])
def test_relations(A, N, rng):
    for c in tp.check_relations(A, N, rng):
        assert c.passed, (c.id, c.residual)


def test_relations_scalar_case(rng):
    for c in tp.check_relations(tp.CoefficientAlgebra.scalars(), 8, rng):
        assert c.passed, (c.id, c.residual)


def test_shift_defect_locations(A):
    T = tp.build_toeplitz(A, 6)
    d = tp.shift_defects(T)
    assert set(d["S*S-I"].nonzero().entries) == {(5, 5)}
    assert set(d["SS*-I"].nonzero().entries) == {(0, 0)}


def test_small_truncation_rejected(A):
    with pytest.raises(ValueError):
        tp.build_word_rep(A, 3)
    with pytest.raises(ValueError):
        tp.check_diagram(4, A=A)


def test_block_permutation_is_bijection():
    perm = tp.block_permutation(5)
    assert sorted(perm) == list(range(10))
    assert perm[2 * 3 + 1] == 5 + 3


def test_p_map(A, rng):
    for c in tp.check_p_map(A.beta, rng, samples=20):
        assert c.passed, (c.id, c.residual)


def test_diagram_generators(A):
    checks, reports = tp.check_diagram(8, probes=3, A=A)
    for c in checks:
        assert c.passed, (c.id, c.residual, c.detail)
    assert [r.word for r in reports[:3]] == ["g", "s", "a"]


def test_defect_norms_stable_in_N(A):
    by_N = {N: tp.check_diagram(N, probes=3, A=A)[1] for N in (8, 16)}
    dt, di = tp.defect_norm_drift(by_N)
    assert dt <= 1e-12 and di <= 1e-12


def test_ideal(A):
    c = tp.check_ideal(A, 10)
    assert c.passed, c.residual


def test_word_with_too_many_shifts(A):
    with pytest.raises(ValueError):
        tp.diagram_word(A, ["s", "s", "s", "s"], 8)


def test_fourier_mode_roundtrip(A, rng):
    a = A.random(rng)
    x = A.embed(a, 2)
    assert (A.fourier_mode(x, 2) - a).max_abs() == 0
    assert A.fourier_mode(x, 0).max_abs() == 0
