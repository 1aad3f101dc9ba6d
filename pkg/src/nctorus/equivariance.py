"""Equivariance of the Heisenberg module under metaplectic operators.

For an integer ``theta``-symplectic ``W`` and an operator ``F`` the verifier
checks ``(F f) U_l = F(f alpha_W(U_l))`` with ``alpha_W(delta_l) = delta_{W l}``,
the change of frame between ``theta`` and the standard form, and the
compatibility ``<f, F g>_A = alpha_{W^-1}(<F^-1 f, g>_A)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Sequence

import numpy as np

from .algebra import SkewMatrix, lattice_action, lattice_box
from .gaussian import FunctionState, l2_distance, l2_norm
from .metaplectic import (MetaplecticOp, chirp_op, fourier_op, inverse, op_for_lattice_matrix, projection,
                          sub_op)
from .module import (ModuleContext, flip_op, heisenberg_shift, inner_A, inner_A_via_action, module_context,
                     right_act)
from .report import CheckResult
from .symplectic import LatticeImage, check_theta_symplectic, standard_J

CLOSED_FORM_TOL = 1e-10
WINDOW_TOL = 1e-8

Operator = Callable[[FunctionState], FunctionState]


@dataclass
class EquivarianceCase:
    """One operator ``op`` paired with the lattice matrix ``W_theta`` it intertwines."""

    name: str
    ctx: ModuleContext
    W_theta: np.ndarray
    op: Operator
    op_inverse: Operator
    probes: List[FunctionState]
    tolerance: float = CLOSED_FORM_TOL

    def __post_init__(self):
        self.W_theta = np.round(np.asarray(self.W_theta)).astype(np.int64)
        ok, res = check_theta_symplectic(self.W_theta, self.ctx.theta, tol=1e-10)
        if not ok:
            raise ValueError(f"{self.name}: W_theta is not theta-symplectic (residual {res:.3g})")
        if isinstance(self.op, MetaplecticOp):
            T = self.ctx.embedding.T
            target = T @ np.linalg.inv(self.W_theta) @ np.linalg.inv(T)
            res = float(np.max(np.abs(projection(self.op) - target)))
            if res > 1e-10:
                raise ValueError(f"{self.name}: operator does not cover T W^-1 T^-1 (residual {res:.3g})")

    @property
    def alpha(self):
        return lattice_action(self.W_theta, self.ctx.theta, self.ctx.convention)


def metaplectic_case(name: str, ctx: ModuleContext, W_theta, probes, op: MetaplecticOp = None,
                     tolerance: float = CLOSED_FORM_TOL) -> EquivarianceCase:
    if op is None:
        op = op_for_lattice_matrix(W_theta, ctx.embedding.T)
    return EquivarianceCase(name, ctx, W_theta, op, inverse(op), list(probes), tolerance)


def flip_case(name: str, ctx: ModuleContext, probes, tolerance: float = 1e-12) -> EquivarianceCase:
    return EquivarianceCase(name, ctx, -np.eye(ctx.n), flip_op, flip_op, list(probes), tolerance)


def _rel(lhs, rhs, f) -> float:
    nrm = l2_norm(f)
    return l2_distance(lhs, rhs) / (nrm if nrm > 0 else 1.0)


def main_identity_residual(case: EquivarianceCase, l) -> float:
    """``max_f ||(F f) U_l - F(f U_{W l})|| / ||f||``."""
    l = np.asarray(l, dtype=np.int64)
    Wl = case.W_theta @ l
    worst = 0.0
    for f in case.probes:
        lhs = right_act(case.op(f), l, case.ctx)
        rhs = case.op(right_act(f, Wl, case.ctx))
        worst = max(worst, _rel(lhs, rhs, f))
    return worst


def check_main_identity(case: EquivarianceCase, l) -> CheckResult:
    r = main_identity_residual(case, l)
    return CheckResult.make(f"{case.name}/main/l={tuple(int(v) for v in l)}", r, case.tolerance)


def check_change_of_frame(case: EquivarianceCase, l) -> CheckResult:
    """``f U^theta_{W_theta l}`` against the standard-frame shift by ``W (T l)``."""
    ctx = case.ctx
    if ctx.q:
        raise ValueError("change of frame needs q = 0")
    T = ctx.embedding.T
    W = T @ case.W_theta @ np.linalg.inv(T)
    v = W @ (T @ np.asarray(l, dtype=float))
    m = ctx.p
    img = LatticeImage(v[:m], np.zeros(0, np.int64), v[m:], np.zeros(0))
    worst = 0.0
    for f in case.probes:
        lhs = right_act(f, case.W_theta @ np.asarray(l, dtype=np.int64), ctx)
        rhs = heisenberg_shift(f, img)
        worst = max(worst, _rel(lhs, rhs, f))
    return CheckResult.make(f"{case.name}/change/l={tuple(int(x) for x in l)}", worst, case.tolerance)


def check_inner_compat(case: EquivarianceCase, ls: Sequence = None, window: bool = True) -> List[CheckResult]:
    """``<f, F g>_A = alpha_{W^-1}(<F^-1 f, g>_A)``.

    Single coefficients at ``ls`` are compared through the closed-form overlap
    (tolerance ``case.tolerance``); with ``window`` the full certified windows
    are compared as algebra elements (tolerance ``1e-8``).
    """
    ctx = case.ctx
    if ls is None:
        ls = list(lattice_box(ctx.n, 1))
    Winv = np.round(np.linalg.inv(case.W_theta)).astype(np.int64)
    alpha_inv = lattice_action(Winv, ctx.theta, ctx.convention)
    probes = case.probes
    pairs = list(zip(probes[::2], probes[1::2])) or [(probes[0], probes[0])]
    worst_point = 0.0
    worst_win = 0.0
    for f, g in pairs:
        Fg = case.op(g)
        Finv_f = case.op_inverse(f)
        scale = l2_norm(f) * l2_norm(g)
        for l in ls:
            l = np.asarray(l, dtype=np.int64)
            lhs = inner_A_via_action(f, Fg, l, ctx)
            # alpha_{W^-1}(phi)(l) = phi(W l)
            rhs = inner_A_via_action(Finv_f, g, case.W_theta @ l, ctx)
            worst_point = max(worst_point, abs(lhs - rhs) / scale)
        if window:
            lhs_el = inner_A(f, Fg, ctx)
            rhs_el = alpha_inv(inner_A(Finv_f, g, ctx))
            worst_win = max(worst_win, (lhs_el - rhs_el).max_abs() / scale)
    out = [CheckResult.make(f"{case.name}/inner-compat/points", worst_point, case.tolerance)]
    if window:
        out.append(CheckResult.make(f"{case.name}/inner-compat/window", worst_win, max(case.tolerance, WINDOW_TOL)))
    return out


def check_flip_extension(theta: SkewMatrix, p: int, q: int = None, radius: int = 3, n_probes: int = 4,
                         seed: int = 0, tol: float = 1e-12) -> CheckResult:
    """``(flip f) U_l = flip(f U_{-l})`` for every ``|l|_inf <= radius``."""
    ctx = module_context(theta, p, q)
    rng = np.random.default_rng(seed)
    probes = [FunctionState.random(rng, ctx.p, ctx.q, 2) for _ in range(n_probes)]
    case = flip_case("flip", ctx, probes, tol)
    worst = 0.0
    for l in lattice_box(ctx.n, radius):
        worst = max(worst, main_identity_residual(case, l))
    return CheckResult.make(f"flip/n={ctx.n}/p={ctx.p}/radius={radius}", worst, tol)


# ---------------------------------------------------------------------------
# generator-by-generator replay for theta = -J


def standard_context(m: int) -> ModuleContext:
    """``theta = -J`` with ``T = diag(-I, I)``: ``U_i`` shifts for ``i <= m``, modulates for ``i > m``."""
    T11 = np.diag(np.r_[-np.ones(m), np.ones(m)])
    return module_context(SkewMatrix(-standard_J(m)), m, T11=T11)


def generator_families(m: int):
    """The three generator operators ``J``, ``M_L``, ``V_P`` with integral lattice matrices."""
    if m == 1:
        L = np.array([[-1.0]])
        P = np.array([[1.0]])
    else:
        L = np.eye(m) + np.diag(np.ones(m - 1), 1)  # unimodular upper triangular
        P = np.ones((m, m)) + np.eye(m)
    return {"fourier": fourier_op(m), "flip": sub_op(L), "otheraction": chirp_op(P)}


def proof_replay(m: int, n_probes: int = 10, seed: int = 0, tol: float = CLOSED_FORM_TOL) -> List[CheckResult]:
    """Each generator family for ``i <= m`` and ``i > m`` separately."""
    ctx = standard_context(m)
    rng = np.random.default_rng(seed)
    probes = [FunctionState.random(rng, m, 0, 2) for _ in range(n_probes)]
    T = ctx.embedding.T
    out = []
    for fam, op in generator_families(m).items():
        W = np.linalg.inv(T) @ np.linalg.inv(projection(op)) @ T
        case = metaplectic_case(f"replay/m={m}/{fam}", ctx, np.round(W), probes, op, tol)
        for regime, idx in (("i<=m", range(m)), ("i>m", range(m, 2 * m))):
            worst = 0.0
            for i in idx:
                e_i = np.zeros(2 * m, np.int64)
                e_i[i] = 1
                worst = max(worst, main_identity_residual(case, e_i))
            out.append(CheckResult.make(f"replay/m={m}/{fam}/{regime}", worst, tol))
    return out


# ---------------------------------------------------------------------------
# general nondegenerate theta


def _random_theta_2d(rng) -> SkewMatrix:
    t = rng.uniform(0.2, 0.9) * rng.choice([-1, 1])
    return SkewMatrix.scalar(t)


def _block_theta_4d(rng) -> SkewMatrix:
    a, b = rng.uniform(0.2, 0.9, size=2) * rng.choice([-1, 1], size=2)
    th = np.zeros((4, 4))
    th[0, 1], th[1, 0] = a, -a
    th[2, 3], th[3, 2] = b, -b
    return SkewMatrix(th)


W6 = np.array([[0, -1], [1, 1]])
W4 = np.array([[0, -1], [1, 0]])
W3 = np.array([[-1, -1], [1, 0]])


def general_cases(n_theta: int = 5, n_probes: int = 4, seed: int = 0) -> List[EquivarianceCase]:
    """Random 2-d and 4-d theta with finite-order lattice matrices."""
    rng = np.random.default_rng(seed)
    cases = []
    for k in range(n_theta):
        th = _random_theta_2d(rng)
        ctx = module_context(th, 1)
        probes = [FunctionState.random(rng, 1, 0, 2) for _ in range(n_probes)]
        for wname, W in (("W6", W6), ("W4", W4), ("W3", W3), ("flip", -np.eye(2))):
            cases.append(metaplectic_case(f"general/2d/{k}/{wname}", ctx, W, probes))
    for k in range(n_theta):
        th = _block_theta_4d(rng)
        ctx = module_context(th, 2)
        probes = [FunctionState.random(rng, 2, 0, 2) for _ in range(n_probes)]
        W = np.zeros((4, 4), np.int64)
        W[:2, :2], W[2:, 2:] = W6, W4
        cases.append(metaplectic_case(f"general/4d/{k}/W6+W4", ctx, W, probes))
        a = rng.normal(size=(4, 4))
        rnd = SkewMatrix(a - a.T)
        ctx_r = module_context(rnd, 2)
        probes_r = [FunctionState.random(rng, 2, 0, 2) for _ in range(n_probes)]
        cases.append(metaplectic_case(f"general/4d/{k}/flip", ctx_r, -np.eye(4), probes_r))
    return cases


def run_case(case: EquivarianceCase, radius: int = 1, inner: bool = True, window: bool = True) -> List[CheckResult]:
    out = []
    worst_main = 0.0
    worst_change = 0.0
    for l in lattice_box(case.ctx.n, radius):
        worst_main = max(worst_main, main_identity_residual(case, l))
        if case.ctx.q == 0:
            worst_change = max(worst_change, check_change_of_frame(case, l).residual)
    out.append(CheckResult.make(f"{case.name}/main", worst_main, case.tolerance))
    if case.ctx.q == 0:
        out.append(CheckResult.make(f"{case.name}/change", worst_change, case.tolerance))
    if inner:
        out.extend(check_inner_compat(case, window=window))
    return out
