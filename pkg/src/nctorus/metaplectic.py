"""Metaplectic operators acting on Gaussian-atom states.

An operator is a unit scalar times a word of steps, applied left to right:

* ``Fourier``: ``f -> int e(-<x, x'>) f(x') dx'``, covering ``J``;
* ``Sub(L)``: ``f -> sqrt(det L) f(L x)``, covering ``diag(L^-1, L^T)``;
* ``Chirp(P)``: ``f -> e(<P x, x>/2) f``, covering ``[[I, 0], [P, I]]``;
* ``Free(fs)``: the generating-function kernel
  ``i^(s - m/2) sqrt|det B^-1| e(W(x, x'))``, covering ``[[A, B], [C, D]]``.

"Covering ``M``" means ``F rho(v) F^-1 = rho(M v)`` for the Heisenberg shifts
``rho(a, xi) f = e(-<a, xi>/2) e(<x, xi>) f(x - a)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np

from .gaussian import FunctionState, _bilinear, _sym, chirp, fourier, l2_distance, l2_inner, sqrt_det, substitute
from .symplectic import CONSTRUCTION_TOL, FreeSymplectic, standard_J, symplectic_residual


def i_power(y: float) -> complex:
    """Principal branch ``i^y = exp(i pi y / 2)``."""
    return complex(np.exp(0.5j * np.pi * y))


@dataclass(frozen=True)
class Fourier:
    def matrix(self, m: int) -> np.ndarray:
        return standard_J(m)


@dataclass(frozen=True)
class Sub:
    L: np.ndarray

    def matrix(self, m: int) -> np.ndarray:
        L = np.atleast_2d(self.L)
        Z = np.zeros_like(L, dtype=float)
        return np.block([[np.linalg.inv(L), Z], [Z, L.T]])


@dataclass(frozen=True)
class Chirp:
    P: np.ndarray

    def matrix(self, m: int) -> np.ndarray:
        P = np.atleast_2d(self.P)
        I = np.eye(m)
        return np.block([[I, np.zeros((m, m))], [P, I]])


@dataclass(frozen=True)
class Free:
    data: FreeSymplectic

    def matrix(self, m: int) -> np.ndarray:
        return self.data.matrix


Step = Union[Fourier, Sub, Chirp, Free]


def apply_free(fs: FreeSymplectic, f: FunctionState) -> FunctionState:
    """Exact action of the generating-function kernel on every atom."""
    if f.q:
        raise ValueError("metaplectic operators act on R^m states (q = 0)")
    m = fs.m
    if f.p != m:
        raise ValueError(f"operator acts on R^{m}, state lives on R^{f.p}")
    Binv = np.linalg.inv(fs.B)
    BinvA = _sym(Binv @ fs.A)
    Q = f.M + BinvA
    Qinv = np.linalg.inv(Q)
    pref = i_power(fs.maslov - m / 2) * np.sqrt(abs(np.linalg.det(Binv)))
    c = f.c * pref / sqrt_det(-1j * Q) * np.exp(-1j * np.pi * _bilinear(Qinv, f.b, f.b))
    M = _sym(fs.D @ Binv) - np.einsum("ji,njk,kl->nil", Binv, Qinv, Binv)
    b = np.einsum("ji,njk,nk->ni", Binv, Qinv, f.b)
    return f._with(c=c, M=_sym(M), b=b)


def _apply_step(step: Step, f: FunctionState) -> FunctionState:
    if isinstance(step, Fourier):
        return fourier(f)
    if isinstance(step, Sub):
        return substitute(f, step.L)
    if isinstance(step, Chirp):
        return chirp(f, step.P)
    if isinstance(step, Free):
        return apply_free(step.data, f)
    raise TypeError(f"unknown step {step!r}")


@dataclass(frozen=True)
class MetaplecticOp:
    m: int
    scalar: complex = 1.0
    steps: Tuple[Step, ...] = ()

    def __call__(self, f: FunctionState) -> FunctionState:
        return apply(self, f)

    def __mul__(self, z) -> "MetaplecticOp":
        return MetaplecticOp(self.m, self.scalar * complex(z), self.steps)

    __rmul__ = __mul__

    def to_json(self) -> dict:
        def enc(s):
            if isinstance(s, Fourier):
                return {"kind": "Fourier"}
            if isinstance(s, Sub):
                return {"kind": "Sub", "L": np.atleast_2d(s.L).tolist()}
            if isinstance(s, Chirp):
                return {"kind": "Chirp", "P": np.atleast_2d(s.P).tolist()}
            d = s.data
            return {"kind": "Free", "A": d.A.tolist(), "B": d.B.tolist(), "C": d.C.tolist(),
                    "D": d.D.tolist(), "maslov": int(d.maslov)}

        return {"m": self.m, "scalar": [self.scalar.real, self.scalar.imag], "steps": [enc(s) for s in self.steps]}

    @classmethod
    def from_json(cls, data: dict) -> "MetaplecticOp":
        steps = []
        for s in data["steps"]:
            k = s["kind"]
            if k == "Fourier":
                steps.append(Fourier())
            elif k == "Sub":
                steps.append(Sub(np.array(s["L"], float)))
            elif k == "Chirp":
                steps.append(Chirp(np.array(s["P"], float)))
            elif k == "Free":
                steps.append(Free(FreeSymplectic(s["A"], s["B"], s["C"], s["D"], s["maslov"])))
            else:
                raise ValueError(f"unknown step kind {k}")
        return cls(data["m"], complex(*data["scalar"]), tuple(steps))


def identity(m: int) -> MetaplecticOp:
    return MetaplecticOp(m)


def fourier_op(m: int) -> MetaplecticOp:
    return MetaplecticOp(m, 1.0, (Fourier(),))


def sub_op(L) -> MetaplecticOp:
    L = np.atleast_2d(np.asarray(L, dtype=float))
    return MetaplecticOp(L.shape[0], 1.0, (Sub(L),))


def chirp_op(P) -> MetaplecticOp:
    P = np.atleast_2d(np.asarray(P, dtype=float))
    return MetaplecticOp(P.shape[0], 1.0, (Chirp(_sym(P)),))


def free_op(A, B, C, D, maslov: int = None, scalar: complex = 1.0) -> MetaplecticOp:
    M = np.block([[np.atleast_2d(A), np.atleast_2d(B)], [np.atleast_2d(C), np.atleast_2d(D)]]).astype(float)
    fs = FreeSymplectic.from_matrix(M, maslov)
    return MetaplecticOp(fs.m, scalar, (Free(fs),))


def apply(op: MetaplecticOp, f: FunctionState) -> FunctionState:
    if f.q:
        raise ValueError("metaplectic operators act on R^m states (q = 0)")
    for s in op.steps:
        f = _apply_step(s, f)
    return f * op.scalar


def projection(op: MetaplecticOp) -> np.ndarray:
    """Symplectic matrix covered by ``op``; a word maps to the reversed product."""
    M = np.eye(2 * op.m)
    for s in op.steps:
        M = s.matrix(op.m) @ M
    return M


def compose(a: MetaplecticOp, b: MetaplecticOp) -> MetaplecticOp:
    """``a o b`` (apply ``b`` first)."""
    if a.m != b.m:
        raise ValueError("operators act on different dimensions")
    return MetaplecticOp(a.m, a.scalar * b.scalar, b.steps + a.steps)


def _inverse_step(s: Step, m: int) -> Tuple[complex, Tuple[Step, ...]]:
    if isinstance(s, Fourier):
        # F^4 = Id
        return 1.0, (Fourier(), Fourier(), Fourier())
    if isinstance(s, Sub):
        L = np.atleast_2d(s.L)
        Linv = np.linalg.inv(L)
        return 1.0 / (sqrt_det(L) * sqrt_det(Linv)), (Sub(Linv),)
    if isinstance(s, Chirp):
        return 1.0, (Chirp(-np.atleast_2d(s.P)),)
    d = s.data
    inv = FreeSymplectic(d.D.T, -d.B.T, -d.C.T, d.A.T, m - d.maslov)
    return 1.0, (Free(inv),)


def inverse(op: MetaplecticOp) -> MetaplecticOp:
    scalar = 1.0 / op.scalar
    steps: Tuple[Step, ...] = ()
    for s in reversed(op.steps):
        z, inv = _inverse_step(s, op.m)
        scalar *= z
        steps = steps + inv
    return MetaplecticOp(op.m, complex(scalar), steps)


def power(op: MetaplecticOp, r: int) -> MetaplecticOp:
    if r < 0:
        return power(inverse(op), -r)
    out = identity(op.m)
    for _ in range(r):
        out = compose(op, out)
    return out


# ---------------------------------------------------------------------------
# orders and scalar lifts


def probe_states(m: int, count: int = 10, seed: int = 0) -> List[FunctionState]:
    rng = np.random.default_rng(seed)
    return [FunctionState.random(rng, m, 0, 1) for _ in range(count)]


@dataclass
class OrderReport:
    lam: complex
    spread: float
    residual: float
    projection_residual: float


def operator_order(op: MetaplecticOp, r: int, probes: Sequence[FunctionState] = None,
                   tol: float = 1e-9, report: bool = False):
    """The scalar ``lam`` with ``op^r = lam Id``, measured on probe atoms.

    Raises ``ArithmeticError`` when the projection does not have order
    dividing ``r`` or the probe estimates disagree.
    """
    P = np.linalg.matrix_power(projection(op), r)
    proj_res = float(np.max(np.abs(P - np.eye(2 * op.m))))
    if proj_res > 1e-10:
        raise ArithmeticError(f"projection^r differs from the identity by {proj_res:.3g}")
    probes = probe_states(op.m) if probes is None else list(probes)
    if len(probes) < 10:
        raise ValueError("need at least 10 probes")
    opr = power(op, r)
    lams, res = [], []
    for f in probes:
        g = apply(opr, f)
        nf = l2_inner(f, f)
        lam = l2_inner(g, f) / nf
        lams.append(lam)
        res.append(l2_distance(g, f * lam) / abs(nf) ** 0.5)
    lams = np.array(lams)
    lam = complex(np.mean(lams))
    spread = float(np.max(np.abs(lams - lam)))
    if spread > tol:
        raise ArithmeticError(f"op^{r} is not scalar on the probes (spread {spread:.3g})")
    out = OrderReport(lam, spread, float(max(res)), proj_res)
    return out if report else lam


def scalar_lift(op: MetaplecticOp, r: int, probes: Sequence[FunctionState] = None) -> MetaplecticOp:
    """``z op`` with ``z = lam^(-1/r)`` (principal root), so that ``(z op)^r = Id``."""
    lam = operator_order(op, r, probes)
    z = complex(np.exp(-1j * np.angle(lam) / r)) / abs(lam) ** (1.0 / r)
    return op * z


# ---------------------------------------------------------------------------
# named operators


def hexic(maslov: int = 1) -> MetaplecticOp:
    """``sqrt(i) int e(x x' - x'^2/2) f(x') dx'`` for ``maslov = 1``."""
    return free_op(1.0, -1.0, 1.0, 0.0, maslov)


def hexic_general(theta12: float) -> MetaplecticOp:
    """``i^(1/6) theta^(-1/2) int e((2 x x' - x'^2) / (2 theta)) f(x') dx'``.

    Covers ``[[1, -theta], [1/theta, 0]]``; for ``theta = 1`` this is
    ``i^(-1/3)`` times :func:`hexic`.
    """
    if theta12 <= 0:
        raise ValueError("hexic_general needs theta12 > 0")
    t = float(theta12)
    return free_op(1.0, -t, 1.0 / t, 0.0, 1, scalar=i_power(-1.0 / 3.0))


def _is_free(M: np.ndarray, tol: float = 1e-12) -> bool:
    m = M.shape[0] // 2
    return abs(np.linalg.det(M[:m, m:])) > tol


def lift_symplectic(M, seed: int = 0) -> MetaplecticOp:
    """Some metaplectic operator covering the standard-symplectic ``M``.

    Free matrices lift directly.  Otherwise ``M = F (J V_P)`` with
    ``F = M (J V_P)^-1`` free, where ``P`` is the first symmetric matrix from a
    deterministic list for which the upper-right block ``B P - A`` is
    invertible.
    """
    M = np.asarray(M, dtype=float)
    res = symplectic_residual(M)
    if res > CONSTRUCTION_TOL * max(1.0, np.max(np.abs(M))) ** 2:
        raise ValueError(f"matrix is not symplectic (residual {res:.3g})")
    m = M.shape[0] // 2
    if _is_free(M):
        return MetaplecticOp(m, 1.0, (Free(FreeSymplectic.from_matrix(M)),))
    rng = np.random.default_rng(seed)
    candidates = [np.eye(m), -np.eye(m)]
    for _ in range(16):
        R = rng.normal(size=(m, m))
        candidates.append(R + R.T)
    for P in candidates:
        JV = standard_J(m) @ Chirp(P).matrix(m)
        F = M @ np.linalg.inv(JV)
        if _is_free(F, 1e-6):
            free = Free(FreeSymplectic.from_matrix(F))
            return MetaplecticOp(m, 1.0, (Chirp(P), Fourier(), free))
    raise ArithmeticError("no two-factor decomposition found")


def equivariant_group_element(op: MetaplecticOp, T: np.ndarray) -> np.ndarray:
    """``W_theta = T^-1 proj(op)^-1 T``: the lattice matrix for which ``op`` is equivariant."""
    return np.linalg.inv(T) @ np.linalg.inv(projection(op)) @ T


def op_for_lattice_matrix(W_theta, T: np.ndarray, seed: int = 0) -> MetaplecticOp:
    """An operator with ``(f F) U_l = (f U_{W l}) F``, i.e. covering ``T W^-1 T^-1``."""
    W_theta = np.asarray(W_theta, dtype=float)
    return lift_symplectic(T @ np.linalg.inv(W_theta) @ np.linalg.inv(T), seed)
