"""Linear algebra around theta-symplectic matrices: the dual deformation
theta', the embedding maps T and S of a Heisenberg module, free symplectic
matrices and their generating functions."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.linalg

from .algebra import SkewMatrix

CONSTRUCTION_TOL = 1e-10
IDENTITY_TOL = 1e-12


def standard_J(m: int) -> np.ndarray:
    """``[[0, I_m], [-I_m, 0]]``."""
    J = np.zeros((2 * m, 2 * m))
    J[:m, m:] = np.eye(m)
    J[m:, :m] = -np.eye(m)
    return J


def symplectic_residual(M: np.ndarray) -> float:
    m = M.shape[0] // 2
    J = standard_J(m)
    return float(np.max(np.abs(M.T @ J @ M - J), initial=0.0))


def split_theta(theta: SkewMatrix, p: int):
    t = theta.matrix
    k = 2 * p
    return t[:k, :k], t[:k, k:], t[k:, :k], t[k:, k:]


def theta_prime(theta: SkewMatrix, p: int) -> SkewMatrix:
    """Block matrix ``[[t11^-1, -t11^-1 t12], [t21 t11^-1, t22 - t21 t11^-1 t12]]``."""
    t11, t12, t21, t22 = split_theta(theta, p)
    if p > 0 and abs(np.linalg.det(t11)) < 1e-14:
        raise np.linalg.LinAlgError("theta_11 is singular")
    inv = np.linalg.inv(t11) if p > 0 else np.zeros((0, 0))
    top = np.hstack([inv, -inv @ t12])
    bottom = np.hstack([t21 @ inv, t22 - t21 @ inv @ t12])
    out = np.vstack([top, bottom])
    if np.max(np.abs(out + out.T), initial=0.0) > CONSTRUCTION_TOL:
        raise ArithmeticError("theta' lost skew-symmetry")
    return SkewMatrix(0.5 * (out - out.T))


def factor_skew(theta11: np.ndarray) -> np.ndarray:
    """Return ``T11`` with ``T11^T J0 T11 = theta11`` for nondegenerate skew ``theta11``.

    Uses the real Schur form, which for a skew matrix is an orthogonal
    congruence to ``(+) d_i [[0, 1], [-1, 0]]``; each block is then rescaled by
    ``sqrt|d_i|`` (with a swap when ``d_i < 0``) and the interleaved
    coordinates are permuted into the ``(q, p)`` layout of ``J0``.
    """
    k = theta11.shape[0]
    if k == 0:
        return np.zeros((0, 0))
    if k % 2:
        raise ValueError("theta11 must have even size")
    if abs(np.linalg.det(theta11)) < 1e-14:
        raise np.linalg.LinAlgError("theta11 is singular")
    sigma, Q = scipy.linalg.schur(theta11, output="real")
    p = k // 2
    B = np.zeros((k, k))
    for j in range(p):
        d = sigma[2 * j, 2 * j + 1]
        r = np.sqrt(abs(d))
        if d > 0:
            B[2 * j:2 * j + 2, 2 * j:2 * j + 2] = r * np.eye(2)
        else:
            B[2 * j:2 * j + 2, 2 * j:2 * j + 2] = r * np.array([[0.0, 1.0], [1.0, 0.0]])
    # interleaved (q1, p1, q2, p2, ...) -> (q1..qp, p1..pp)
    Pi = np.zeros((k, k))
    for j in range(p):
        Pi[j, 2 * j] = 1.0
        Pi[p + j, 2 * j + 1] = 1.0
    T11 = Pi @ B @ Q.T
    res = np.max(np.abs(T11.T @ standard_J(p) @ T11 - theta11))
    if res > CONSTRUCTION_TOL * max(1.0, np.max(np.abs(theta11))):
        raise ArithmeticError(f"factorisation failed, residual {res:.3g}")
    return T11


@dataclass(frozen=True)
class LatticeImage:
    """Components of ``T(l)`` (or ``S(l)``) in ``G = (R^p x Z^q) x (R^p x T^q)``."""

    x: np.ndarray      # continuous shift, R^p
    t: np.ndarray      # lattice shift, Z^q
    xi: np.ndarray     # continuous frequency, R^p
    tau: np.ndarray    # character on Z^q, R^q mod 1

    @property
    def pairing(self) -> float:
        """``<v, J' v>`` = ``x.xi + t.tau``."""
        return float(self.x @ self.xi + self.t @ self.tau)


@dataclass(frozen=True)
class EmbeddingContext:
    p: int
    q: int
    theta: SkewMatrix
    T11: np.ndarray
    T: np.ndarray
    S: np.ndarray
    J: np.ndarray
    Jprime: np.ndarray

    @property
    def n(self) -> int:
        return 2 * self.p + self.q

    def _split(self, v: np.ndarray) -> LatticeImage:
        p, q = self.p, self.q
        t = v[2 * p:2 * p + q]
        ti = np.round(t).astype(np.int64)
        if np.max(np.abs(t - ti), initial=0.0) > 1e-9:
            raise ArithmeticError("lattice component of embedding is not integral")
        return LatticeImage(v[:p], ti, v[p:2 * p], v[2 * p + q:])

    def T_image(self, l) -> LatticeImage:
        return self._split(self.T @ np.asarray(l, dtype=float))

    def S_image(self, l) -> LatticeImage:
        return self._split(self.S @ np.asarray(l, dtype=float))

    def T_prime(self, l) -> np.ndarray:
        v = self.T @ np.asarray(l, dtype=float)
        return np.concatenate([v[:self.p], v[2 * self.p:2 * self.p + self.q]])

    def T_dprime(self, l) -> np.ndarray:
        v = self.T @ np.asarray(l, dtype=float)
        return np.concatenate([v[self.p:2 * self.p], v[2 * self.p + self.q:]])

    def S_prime(self, l) -> np.ndarray:
        v = self.S @ np.asarray(l, dtype=float)
        return np.concatenate([v[:self.p], v[2 * self.p:2 * self.p + self.q]])

    def S_dprime(self, l) -> np.ndarray:
        v = self.S @ np.asarray(l, dtype=float)
        return np.concatenate([v[self.p:2 * self.p], v[2 * self.p + self.q:]])

    def theta_prime(self) -> SkewMatrix:
        return theta_prime(self.theta, self.p)


def build_embedding(theta: SkewMatrix, p: int, q: int = None, T11: np.ndarray = None) -> EmbeddingContext:
    """Assemble ``T``, ``S``, ``J``, ``J'`` for ``n = 2p + q``.

    ``T11`` may be supplied (it must satisfy ``T11^T J0 T11 = theta11``);
    otherwise it is constructed by :func:`factor_skew`.
    """
    n = theta.n
    if q is None:
        q = n - 2 * p
    if p < 0 or q < 0 or 2 * p + q != n:
        raise ValueError(f"need n = 2p + q, got n={n}, p={p}, q={q}")
    t11, t12, t21, t22 = split_theta(theta, p)
    if T11 is None:
        T11 = factor_skew(t11)
    else:
        T11 = np.asarray(T11, dtype=float)
        if p and np.max(np.abs(T11.T @ standard_J(p) @ T11 - t11)) > CONSTRUCTION_TOL:
            raise ValueError("supplied T11 does not satisfy T11^T J0 T11 = theta11")
    k = 2 * p
    T31 = t21
    T32 = np.triu(t22)
    T = np.zeros((k + 2 * q, k + q))
    T[:k, :k] = T11
    T[k:k + q, k:] = np.eye(q)
    T[k + q:, :k] = T31
    T[k + q:, k:] = T32

    S = np.zeros_like(T)
    if p:
        A = standard_J(p) @ np.linalg.inv(T11.T)
        S[:k, :k] = A
        S[:k, k:] = -A @ T31.T
    S[k:k + q, k:] = np.eye(q)
    S[k + q:, k:] = T32.T

    J = np.zeros((k + 2 * q, k + 2 * q))
    J[:k, :k] = standard_J(p)
    J[k:k + q, k + q:] = np.eye(q)
    J[k + q:, k:k + q] = -np.eye(q)
    Jprime = np.where(J < 0, 0.0, J)
    return EmbeddingContext(p, q, theta, T11, T, S, J, Jprime)


def check_theta_symplectic(W, theta: SkewMatrix, tol: float = IDENTITY_TOL) -> Tuple[bool, float]:
    W = np.asarray(W, dtype=float)
    if W.shape != (theta.n, theta.n):
        raise ValueError("W and theta dimensions differ")
    res = float(np.max(np.abs(W.T @ theta.matrix @ W - theta.matrix), initial=0.0))
    return res <= tol, res


@dataclass(frozen=True)
class FreeSymplectic:
    """``[[A, B], [C, D]]`` with ``det B != 0`` and a Maslov index ``s``.

    ``s pi`` must be congruent to ``arg det B^{-1}`` modulo ``2 pi``.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    maslov: int = 0

    def __post_init__(self):
        for name in "ABCD":
            object.__setattr__(self, name, np.atleast_2d(np.asarray(getattr(self, name), dtype=float)))
        detB = np.linalg.det(self.B)
        if abs(detB) < 1e-14:
            raise ValueError("B block is singular: matrix is not free")
        res = symplectic_residual(self.matrix)
        if res > CONSTRUCTION_TOL * max(1.0, np.max(np.abs(self.matrix)) ** 2):
            raise ValueError(f"matrix is not symplectic (residual {res:.3g})")
        parity = 0 if detB > 0 else 1
        if int(self.maslov) % 2 != parity:
            raise ValueError(f"Maslov index {self.maslov} inconsistent with sign of det B^-1")

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return np.block([[self.A, self.B], [self.C, self.D]])

    @classmethod
    def from_matrix(cls, M, maslov: int = None) -> "FreeSymplectic":
        M = np.asarray(M, dtype=float)
        m = M.shape[0] // 2
        B = M[:m, m:]
        if maslov is None:
            maslov = 0 if np.linalg.det(B) > 0 else 1
        return cls(M[:m, :m], B, M[m:, :m], M[m:, m:], maslov)


def generating_function(fs: FreeSymplectic, x, xp) -> float:
    """``1/2 <D B^-1 x, x> - <B^-1 x, x'> + 1/2 <B^-1 A x', x'>``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xp = np.atleast_1d(np.asarray(xp, dtype=float))
    Binv = np.linalg.inv(fs.B)
    return float(0.5 * (fs.D @ Binv @ x) @ x - (Binv @ x) @ xp + 0.5 * (Binv @ fs.A @ xp) @ xp)


def conjugate_to_standard(W_theta, ctx: EmbeddingContext) -> np.ndarray:
    """``T W_theta T^{-1}``, a J-symplectic matrix when ``q = 0``."""
    if ctx.q != 0:
        raise ValueError("conjugation to the standard frame needs q = 0")
    W_theta = np.asarray(W_theta, dtype=float)
    ok, res = check_theta_symplectic(W_theta, ctx.theta, tol=1e-10)
    if not ok:
        raise ValueError(f"W_theta is not theta-symplectic (residual {res:.3g})")
    W = ctx.T @ W_theta @ np.linalg.inv(ctx.T)
    res = symplectic_residual(W)
    if res > CONSTRUCTION_TOL * max(1.0, np.linalg.cond(ctx.T)) ** 2:
        raise ArithmeticError(f"conjugate is not J-symplectic (residual {res:.3g})")
    return W


def load_matrix_fixture(name: str) -> np.ndarray:
    """Matrices shipped in ``nctorus/fixtures`` (``W2``, ``W3``, ``W4``, ``W6``, ``theta3d`` ...)."""
    import json
    from importlib import resources

    with resources.files("nctorus.fixtures").joinpath(f"{name}.json").open() as fh:
        data = json.load(fh)
    return np.array(data["matrix"], dtype=float)
