"""Heisenberg bimodule over ``A = C*(Z^n, theta)`` and its dual algebra ``B``.

Schwartz vectors are :class:`~nctorus.gaussian.FunctionState` objects on
``R^p x Z^q``.  The right ``A``-action and left ``B``-action are translations
and modulations by the images ``T(l)`` and ``S(l)``.  Inner products are
lattice-indexed Gaussian overlaps.  They are computed in closed form on a
window that grows until a rigorous Gaussian tail bound drops below
``tail_tol``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .algebra import AlgebraElement, Convention, OrbifoldElement, SkewMatrix
from .gaussian import FunctionState, l2_distance, l2_norm, modulate, reflect, sqrt_det, translate
from .symplectic import EmbeddingContext, LatticeImage, build_embedding

TAIL_TOL = 1e-12
MAX_WINDOW = 40


@dataclass(frozen=True)
class ModuleContext:
    """Data of one Heisenberg module.

    ``convention`` is the cocycle convention under which ``f -> f U_l`` is a
    right action of the twisted group algebra with parameter ``theta``.  The
    dual algebra acting on the left has parameter :attr:`theta_B`.
    """

    embedding: EmbeddingContext
    convention: Convention = Convention.MODULE
    tail_tol: float = TAIL_TOL
    min_window: int = 1

    @property
    def theta(self) -> SkewMatrix:
        return self.embedding.theta

    @property
    def p(self) -> int:
        return self.embedding.p

    @property
    def q(self) -> int:
        return self.embedding.q

    @property
    def n(self) -> int:
        return self.embedding.n

    @property
    def theta_B(self) -> SkewMatrix:
        """Parameter of the left algebra, ``-S^T J S``.

        It agrees with :func:`~nctorus.symplectic.theta_prime` after the
        relabelling ``(l1, l2) -> (l1, -l2)`` of the lattice.
        """
        E = self.embedding
        M = -E.S.T @ E.J @ E.S
        return SkewMatrix(0.5 * (M - M.T))


def module_context(theta, p: int, q: int = None, T11=None, **kw) -> ModuleContext:
    if not isinstance(theta, SkewMatrix):
        theta = SkewMatrix(theta)
    return ModuleContext(build_embedding(theta, p, q, T11), **kw)


# ---------------------------------------------------------------------------
# actions


def heisenberg_shift(f: FunctionState, img: LatticeImage) -> FunctionState:
    """``e(-<x, xi>/2) e(<y, xi>) f(y - x)`` for ``img = (x, xi)`` in ``G``."""
    g = modulate(translate(f, img.x, img.t), img.xi, img.tau)
    return g * complex(np.exp(-1j * np.pi * img.pairing))


def right_act(f: FunctionState, l, ctx: ModuleContext) -> FunctionState:
    """``f U_l``."""
    return heisenberg_shift(f, ctx.embedding.T_image(l))


def left_act(l, f: FunctionState, ctx: ModuleContext) -> FunctionState:
    """``V_l f``, which equals the Heisenberg shift by ``-S(l)``."""
    return heisenberg_shift(f, ctx.embedding.S_image(-np.asarray(l)))


def right_act_element(f: FunctionState, a: AlgebraElement, ctx: ModuleContext) -> FunctionState:
    if a.theta != ctx.theta or a.convention != ctx.convention:
        raise ValueError("element does not belong to the algebra acting on the right")
    parts = [right_act(f, l, ctx) * v for l, v in a]
    return FunctionState.concat(parts) if parts else FunctionState.empty(ctx.p, ctx.q)


def left_act_element(b: AlgebraElement, f: FunctionState, ctx: ModuleContext) -> FunctionState:
    if b.theta != ctx.theta_B or b.convention != ctx.convention:
        raise ValueError("element does not belong to the algebra acting on the left")
    parts = [left_act(l, f, ctx) * v for l, v in b]
    return FunctionState.concat(parts) if parts else FunctionState.empty(ctx.p, ctx.q)


def flip_op(f: FunctionState) -> FunctionState:
    """``f(x, t) -> f(-x, -t)``."""
    return reflect(f)


# ---------------------------------------------------------------------------
# overlaps


@dataclass
class _PairEnvelope:
    """``log |overlap|`` of one atom pair as a function of ``z = (a, xi)``."""

    H: np.ndarray
    z0: np.ndarray
    peak: float
    t_shift: tuple


def _pair_data(u: FunctionState, v: FunctionState, i: int, j: int):
    p = u.p
    Mu = u.M[i]
    Q = Mu - np.conj(v.M[j])
    Qinv = np.linalg.inv(Q)
    K = np.hstack([Mu, -np.eye(p)])
    v0 = u.b[i] - np.conj(v.b[j])
    big = np.zeros((2 * p, 2 * p), complex)
    big[:p, :p] = Mu
    quad = big - K.T @ Qinv @ K
    lin = np.concatenate([u.b[i], np.zeros(p)]) - K.T @ Qinv @ v0
    logc = (np.log(u.c[i] * np.conj(v.c[j]) + 0j) - 1j * np.pi * v0 @ Qinv @ v0
            - np.log(sqrt_det(-1j * Q)))
    return quad, lin, logc


def _envelopes(u: FunctionState, v: FunctionState):
    out = []
    for i in range(len(u)):
        for j in range(len(v)):
            t_shift = tuple(int(a - b) for a, b in zip(u.t[i], v.t[j]))
            if u.p == 0:
                out.append(_PairEnvelope(np.zeros((0, 0)), np.zeros(0),
                                         float(np.log(abs(u.c[i] * v.c[j]) + 1e-320)), t_shift))
                continue
            quad, lin, logc = _pair_data(u, v, i, j)
            H = 0.5 * (quad.imag + quad.imag.T)
            if np.min(np.linalg.eigvalsh(H)) <= 0:
                raise ArithmeticError("overlap envelope is not decaying")
            z0 = -np.linalg.solve(H, lin.imag)
            peak = float(logc.real + np.pi * lin.imag @ np.linalg.solve(H, lin.imag))
            out.append(_PairEnvelope(H, z0, peak, t_shift))
    return out


def overlap_arrays(u: FunctionState, v: FunctionState, a, ta, xi, tau) -> np.ndarray:
    """Vectorised :func:`overlap` for stacked image components (one row per image)."""
    K = a.shape[0]
    out = np.zeros(K, complex)
    if not len(u) or not len(v) or not K:
        return out
    for i in range(len(u)):
        for j in range(len(v)):
            mask = np.all(ta == (u.t[i] - v.t[j]), axis=1) if u.q else np.ones(K, bool)
            if not mask.any():
                continue
            Mu = u.M[i]
            Q = Mu - np.conj(v.M[j])
            Qinv = np.linalg.inv(Q)
            am, xim = a[mask], xi[mask]
            w = am @ Mu.T + u.b[i] - np.conj(v.b[j]) - xim
            expo = (1j * np.pi * np.einsum("ki,ij,kj->k", am, Mu, am) + 2j * np.pi * am @ u.b[i]
                    - 1j * np.pi * np.einsum("ki,ij,kj->k", w, Qinv, w))
            if u.q:
                expo = expo - 2j * np.pi * (tau[mask] @ v.t[j])
            out[mask] += u.c[i] * np.conj(v.c[j]) * np.exp(expo) / sqrt_det(-1j * Q)
    return out


def overlap(u: FunctionState, v: FunctionState, imgs: Sequence[LatticeImage]) -> np.ndarray:
    """``sum_t int e(-<x, xi> - <t, tau>) u(x + a, t + t_a) conj(v(x, t)) dx`` per image."""
    K, p, q = len(imgs), u.p, u.q
    a = np.array([im.x for im in imgs], float).reshape(K, p)
    xi = np.array([im.xi for im in imgs], float).reshape(K, p)
    ta = np.array([im.t for im in imgs], np.int64).reshape(K, q)
    tau = np.array([im.tau for im in imgs], float).reshape(K, q)
    return overlap_arrays(u, v, a, ta, xi, tau)


def _shell_tail(lam: float, d: float, dim: int) -> float:
    """Upper bound for ``sum_{l in Z^dim, |l - c|_inf >= d} exp(-pi lam |l - c|^2)``."""
    if dim == 0:
        return 0.0
    if d <= 0:
        return np.inf
    one_d_tail = 2.0 * np.exp(-np.pi * lam * d * d) * (1.0 + 1.0 / (2 * np.pi * lam * d))
    full = 1.0 + 1.0 / np.sqrt(lam)
    return dim * one_d_tail * full ** (dim - 1)


@dataclass
class InnerProductResult:
    element: AlgebraElement
    window: int
    tail_bound: float


def _window_sum(u: FunctionState, v: FunctionState, Mimg: np.ndarray, p: int, q: int,
                tail_tol: float, min_window: int):
    """Pick a radius for ``l1`` and the finite set of ``l2`` per atom pair.

    ``Mimg`` is ``T`` or ``S``; its top ``2p`` rows give ``z = C1 l1 + C2 l2``
    and the ``Z^q`` rows equal ``l2``.
    """
    k = 2 * p
    C1, C2 = Mimg[:k, :k], Mimg[:k, k:]
    envs = _envelopes(u, v)
    l2_set = sorted({e.t_shift for e in envs})
    if p == 0:
        return 0, 0.0, l2_set
    C1inv = np.linalg.inv(C1)
    R = max(min_window, 1)
    while True:
        bound = 0.0
        for env in envs:
            lam = float(np.min(np.linalg.eigvalsh(C1.T @ env.H @ C1)))
            w = env.z0 - C2 @ np.array(env.t_shift, float) if q else env.z0
            l0 = C1inv @ w
            d = R + 0.5 - np.max(np.abs(l0))
            bound += np.exp(env.peak) * _shell_tail(lam, d, k)
        if bound <= tail_tol:
            return R, float(bound), l2_set
        R += 1
        if R > MAX_WINDOW:
            raise RuntimeError(f"lattice window exceeded {MAX_WINDOW} (tail bound {bound:.3g})")


def _lattice_points(R: int, p: int, l2_set) -> np.ndarray:
    l1 = np.stack(np.meshgrid(*([np.arange(-R, R + 1)] * (2 * p)), indexing="ij"), -1).reshape(-1, 2 * p)
    l2 = np.array(l2_set, np.int64).reshape(len(l2_set), -1)
    return np.hstack([np.repeat(l1, len(l2), axis=0), np.tile(l2, (len(l1), 1))]).astype(np.int64)


def _windowed(u: FunctionState, v: FunctionState, ctx: ModuleContext, Mimg: np.ndarray, sign: int):
    """Coefficients ``e(sign <x, xi>/2) overlap`` on the certified window, small ones pruned."""
    p, q = ctx.p, ctx.q
    R, bound, l2_set = _window_sum(u, v, Mimg, p, q, ctx.tail_tol, ctx.min_window)
    pts = _lattice_points(R, p, l2_set)
    V = pts @ Mimg.T
    a, xi = V[:, :p], V[:, p:2 * p]
    ta = np.round(V[:, 2 * p:2 * p + q]).astype(np.int64)
    tau = V[:, 2 * p + q:]
    vals = overlap_arrays(u, v, a, ta, xi, tau)
    pairing = np.einsum("ki,ki->k", a, xi) + np.einsum("ki,ki->k", ta, tau)
    vals = vals * np.exp(sign * 1j * np.pi * pairing)
    # pruned terms add at most cut * len(pts) to the certified error
    cut = ctx.tail_tol / (10.0 * max(len(pts), 1))
    keep = np.abs(vals) >= cut
    bound += cut * int(np.sum(~keep))
    return pts[keep], vals[keep], R, float(bound)


def inner_A(f: FunctionState, g: FunctionState, ctx: ModuleContext, details: bool = False):
    """``<f, g>_A(l) = e(-<T'l, T''l>/2) int e(-<x, T''l>) g(x + T'l) conj(f(x)) dx``."""
    pts, vals, R, bound = _windowed(g, f, ctx, ctx.embedding.T, -1)
    el = AlgebraElement(ctx.theta, dict(zip(map(tuple, pts), vals)), ctx.convention)
    return InnerProductResult(el, R, bound) if details else el


def inner_B(f: FunctionState, g: FunctionState, ctx: ModuleContext, details: bool = False):
    """``_B<f, g>(l) = e(<S'l, S''l>/2) int e(<x, S''l>) conj(g(x + S'l)) f(x) dx / |det T11|``."""
    pts, vals, R, bound = _windowed(g, f, ctx, ctx.embedding.S, -1)
    # conj(e(-P/2) overlap) = e(P/2) conj(overlap)
    vals = np.conj(vals) / covolume(ctx)
    el = AlgebraElement(ctx.theta_B, dict(zip(map(tuple, pts), vals)), ctx.convention)
    return InnerProductResult(el, R, bound / covolume(ctx)) if details else el


def covolume(ctx: ModuleContext) -> float:
    """``|det T11|``: Haar normalisation that makes the two inner products match."""
    return float(abs(np.linalg.det(ctx.embedding.T11))) if ctx.p else 1.0


def inner_A_via_action(f: FunctionState, g: FunctionState, l, ctx: ModuleContext) -> complex:
    """``<g U_{-l}, f>_{L^2}``, an independent route to one coefficient of ``<f, g>_A``."""
    from .gaussian import l2_inner

    return l2_inner(right_act(g, -np.asarray(l), ctx), f)


# ---------------------------------------------------------------------------
# crossed-product module


def relative_residual(lhs: FunctionState, rhs: FunctionState, ref: FunctionState) -> float:
    nrm = l2_norm(ref)
    return l2_distance(lhs, rhs) / (nrm if nrm > 0 else 1.0)


def check_compatibility(op: Callable[[FunctionState], FunctionState], alpha, ctx: ModuleContext,
                        probes: Sequence[FunctionState], tol: float = 1e-10) -> float:
    """Largest relative residual of ``(f W) U_i = (f alpha(U_i)) W`` over generators and probes."""
    worst = 0.0
    for f in probes:
        for i in range(ctx.n):
            Ui = AlgebraElement.generator(ctx.theta, i + 1, ctx.convention)
            lhs = right_act_element(op(f), Ui, ctx)
            rhs = op(right_act_element(f, alpha(Ui), ctx))
            worst = max(worst, relative_residual(lhs, rhs, f))
    return worst


def crossed_module_act(f: FunctionState, x: OrbifoldElement, Wop: Callable[[FunctionState], FunctionState],
                       ctx: ModuleContext, probes: Optional[Sequence[FunctionState]] = None,
                       tol: float = 1e-10) -> FunctionState:
    """``f (sum_g a_g delta_g) = sum_g (f a_g) W^g``.

    When ``probes`` are given the compatibility of ``Wop`` with ``x.alpha`` is
    checked first and a ``ValueError`` is raised if it fails.
    """
    if probes is not None:
        res = check_compatibility(Wop, x.alpha, ctx, probes, tol)
        if res > tol:
            raise ValueError(f"module operator is not compatible with the action (residual {res:.3g})")
    pieces = []
    for g, a in sorted(x.parts.items()):
        h = right_act_element(f, a, ctx)
        for _ in range(g):
            h = Wop(h)
        pieces.append(h)
    pieces = [s for s in pieces if len(s)]
    return FunctionState.concat(pieces) if pieces else FunctionState.empty(ctx.p, ctx.q)
