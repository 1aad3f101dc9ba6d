"""Projections in ``A_theta`` and in the flip crossed product ``A_theta x| Z_2``.

* The eight explicit projections ``P_1 ... P_8`` of the 3-d flip orbifold.
* Rieffel projections ``p = g(U_1) U_2 + f(U_1) + U_2^* g(U_1)`` of trace
  ``theta`` built from smooth bump functions, a flip-invariant rotation of
  them, and the trace identity ``theta = 2 tau(S_g) + (1/2 + 1/2) - (1/2 + 1/2)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from .algebra import (AlgebraElement, Automorphism, Convention, FiniteCyclicAction, OrbifoldElement,
                      SkewMatrix, build_action, e)

GRID = 1 << 14


# ---------------------------------------------------------------------------
# P_1 ... P_8


# (sign, phase multiplier of theta_12, exponent vector of the monomial)
PROJECTION_TABLE = {
    1: (+1, 0.0, (0, 0, 0)),
    2: (-1, 0.0, (1, 0, 0)),
    3: (-1, 0.0, (0, 1, 0)),
    4: (+1, 0.0, (0, 0, 1)),
    5: (-1, 0.5, (1, 1, 0)),
    6: (-1, 0.0, (1, 0, 1)),
    7: (-1, 0.0, (0, 1, 1)),
    8: (-1, 0.5, (1, 1, 1)),
}


def flip_action(theta: SkewMatrix, convention: Convention = Convention.PRESENTATION) -> Automorphism:
    return build_action(FiniteCyclicAction(-np.eye(theta.n, dtype=np.int64), theta), convention)


@dataclass
class ProjectionSpec:
    index: int
    theta: SkewMatrix
    element: OrbifoldElement

    @property
    def idempotence_residual(self) -> float:
        return (self.element * self.element - self.element).max_abs()

    @property
    def selfadjoint_residual(self) -> float:
        return (self.element.star() - self.element).max_abs()


def build_projection(i: int, theta: SkewMatrix, convention: Convention = Convention.PRESENTATION,
                     tol: float = 1e-12) -> ProjectionSpec:
    """``P_i = (1 + sign e(c theta_12) u^k w) / 2`` with ``u^k`` the ordered monomial.

    The table assumes ``theta_13`` and ``theta_23`` are integers.  Raises
    ``ArithmeticError`` if the result is not a projection.
    """
    if i not in PROJECTION_TABLE:
        raise ValueError("projection index must be in 1..8")
    if theta.n != 3:
        raise ValueError("P_1 ... P_8 live over a 3-d theta")
    sign, c, exps = PROJECTION_TABLE[i]
    alpha = flip_action(theta, convention)
    mono = AlgebraElement.monomial(theta, exps, convention) * complex(e(c * theta[0, 1]))
    one = AlgebraElement.one(theta, convention)
    w = OrbifoldElement.group_unitary(alpha, 2)
    x = OrbifoldElement.from_algebra(alpha, 2, one) + OrbifoldElement.from_algebra(alpha, 2, mono * sign) * w
    spec = ProjectionSpec(i, theta, x * 0.5)
    r = max(spec.idempotence_residual, spec.selfadjoint_residual)
    if r > tol:
        raise ArithmeticError(f"P_{i} fails the projection relations (residual {r:.3g})")
    return spec


def projection_trace(spec: ProjectionSpec) -> float:
    return float(spec.element.trace().real)


# ---------------------------------------------------------------------------
# Rieffel projections


def smooth_step_pair(x: np.ndarray):
    """``(s(x), 1 - s(x))`` for the C-infinity step ``s``, each computed without cancellation.

    ``s`` is 0 for ``x <= 0``, 1 for ``x >= 1`` and satisfies ``s(1 - x) = 1 - s(x)``.
    """
    x = np.asarray(x, dtype=float)
    s = (x >= 1).astype(float)
    r = (x <= 0).astype(float)
    mid = (x > 0) & (x < 1)
    xm = x[mid]
    a = np.exp(-1.0 / xm)
    b = np.exp(-1.0 / (1.0 - xm))
    s[mid] = a / (a + b)
    r[mid] = b / (a + b)
    return s, r


def smooth_step(x: np.ndarray) -> np.ndarray:
    return smooth_step_pair(x)[0]


@dataclass
class RieffelData:
    """Bump pair on the circle ``R/Z`` and its truncated Fourier coefficients.

    ``f`` rises on ``[0, eps]``, equals 1 on ``[eps, theta]`` and falls on
    ``[theta, theta + eps]``; ``g = sqrt(f - f^2)`` on ``[0, eps]``.  With
    ``symmetric`` the pair is rotated so that ``f`` is even, which makes the
    resulting projection flip invariant.
    """

    theta12: float
    fourier_cutoff: int
    eps: Optional[float] = None
    symmetric: bool = False
    grid: int = GRID

    def __post_init__(self):
        t = self.theta12
        if not 0 < t < 1:
            raise ValueError("theta12 must lie in (0, 1)")
        if self.eps is None:
            self.eps = 0.95 * min(t, 1 - t)
        if not 0 < self.eps < min(t, 1 - t):
            raise ValueError("eps must satisfy 0 < eps < min(theta, 1 - theta)")

    @property
    def shift(self) -> float:
        return 0.5 * (self.theta12 + self.eps) if self.symmetric else 0.0

    def samples(self):
        t = np.arange(self.grid) / self.grid
        s = (t + self.shift) % 1.0
        th, eps = self.theta12, self.eps
        rise, rise_c = smooth_step_pair(s / eps)
        _, fall = smooth_step_pair((s - th) / eps)
        f = np.where(s < eps, rise, np.where(s < th, 1.0, np.where(s < th + eps, fall, 0.0)))
        g = np.where(s < eps, np.sqrt(rise * rise_c), 0.0)
        return t, f, g

    def coefficients(self):
        """``(ks, f_hat, g_hat)`` for ``|k| <= cutoff`` with ``h(t) = sum h_k e(k t)``."""
        _, f, g = self.samples()
        F = np.fft.fft(f) / self.grid
        G = np.fft.fft(g) / self.grid
        ks = np.arange(-self.fourier_cutoff, self.fourier_cutoff + 1)
        return ks, F[ks % self.grid], G[ks % self.grid]


def _function_of_U1(theta: SkewMatrix, ks, coeffs, conv: Convention) -> AlgebraElement:
    return AlgebraElement(theta, {(int(k), 0): c for k, c in zip(ks, coeffs)}, conv)


@dataclass
class RieffelResult:
    element: AlgebraElement
    idempotence: float
    selfadjoint: float
    trace_error: float


def _norm1(a: AlgebraElement) -> float:
    return a.norm1()


def rieffel_projection(data: RieffelData, convention: Convention = Convention.PRESENTATION,
                       bound: float = None) -> RieffelResult:
    """Truncated ``p``; residuals are l^1 norms, which dominate the C*-norm."""
    theta = SkewMatrix.scalar(data.theta12)
    ks, F, G = data.coefficients()
    f_el = _function_of_U1(theta, ks, F, convention)
    g_el = _function_of_U1(theta, ks, G, convention)
    U2 = AlgebraElement.generator(theta, 2, convention)
    p = g_el * U2 + f_el + U2.star() * g_el
    res = RieffelResult(p, _norm1(p * p - p), _norm1(p.star() - p), abs(p.trace() - data.theta12))
    if bound is not None and res.idempotence > bound:
        raise ArithmeticError(f"cutoff {data.fourier_cutoff} too small: ||p^2 - p|| = {res.idempotence:.3g}")
    return res


@dataclass
class FlipInvariantResult:
    p: AlgebraElement
    flip_residual: float
    idempotence: float
    Sg: OrbifoldElement
    Sg_idempotence: float
    Sg_trace: float


def flip_invariant_variant(data: RieffelData, convention: Convention = Convention.PRESENTATION
                           ) -> FlipInvariantResult:
    """Rotated Rieffel projection ``p`` with ``alpha(p) = p`` and ``S_g = p (1 + w) / 2``."""
    if not data.symmetric:
        data = RieffelData(data.theta12, data.fourier_cutoff, data.eps, True, data.grid)
    r = rieffel_projection(data, convention)
    p = r.element
    theta = p.theta
    alpha = flip_action(theta, convention) if theta.n == 3 else build_action(
        FiniteCyclicAction(-np.eye(2, dtype=np.int64), theta), convention)
    flip_res = _norm1(alpha(p) - p)
    half = OrbifoldElement.from_algebra(alpha, 2, AlgebraElement.one(theta, convention) * 0.5)
    w = OrbifoldElement.group_unitary(alpha, 2)
    Sg = OrbifoldElement.from_algebra(alpha, 2, p) * (half + w * 0.5)
    sq = Sg * Sg - Sg
    Sg_res = sum(_norm1(sq.part(g)) for g in (0, 1))
    return FlipInvariantResult(p, flip_res, r.idempotence, Sg, Sg_res, float(Sg.trace().real))


def sg_trace_identity(theta12: float, Sg_trace: float) -> float:
    """``|theta12 - (2 tau(S_g) + (tau P_1 + tau P_2) - (tau P_3 + tau P_4))|`` with ``tau P_i = 1/2``."""
    return abs(theta12 - (2.0 * Sg_trace + (0.5 + 0.5) - (0.5 + 0.5)))


def convergence_study(theta12: float = (np.sqrt(5) - 1) / 2, cutoffs: Sequence[int] = (16, 32, 64, 128),
                      convention: Convention = Convention.PRESENTATION) -> List[Dict[str, float]]:
    rows = []
    for n in cutoffs:
        r = rieffel_projection(RieffelData(theta12, n), convention)
        fi = flip_invariant_variant(RieffelData(theta12, n, symmetric=True), convention)
        rows.append({"cutoff": n, "idempotence": r.idempotence, "trace_error": r.trace_error,
                     "flip_residual": fi.flip_residual, "Sg_trace_identity": sg_trace_identity(theta12, fi.Sg_trace)})
    return rows
