"""Twisted group algebras C*(Z^n, omega_theta), their lattice automorphisms,
canonical traces, and crossed products by finite cyclic groups.

Elements are finitely supported coefficient maps on Z^n.  The basis element
at ``l`` is the canonical unitary ``delta_l``; products follow

    delta_x * delta_y = omega(x, y) * delta_{x+y}.

Phases are always evaluated as ``e(t) = exp(2 pi i t)`` from a real ``t``.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Sequence, Tuple

import numpy as np

Lattice = Tuple[int, ...]

EXACT_TOL = 1e-12


def e(t):
    """``exp(2 pi i t)``."""
    return np.exp(2j * np.pi * np.asarray(t, dtype=float))


class Convention(enum.Enum):
    """Normalisation of the bicharacter ``omega(x, y) = e(sign * scale * <theta x, y>)``.

    PRESENTATION reproduces ``U_k U_j = e(theta_jk) U_j U_k`` verbatim.
    FULL_PHASE is ``e(<-theta x, y>)`` without the half.
    MODULE is ``e(<-theta x, y> / 2)``: the cocycle under which the
    Heisenberg-module formulas (right action by ``T``) are a right action.
    """

    PRESENTATION = (1, 0.5)
    FULL_PHASE = (-1, 1.0)
    MODULE = (-1, 0.5)

    @property
    def sign(self) -> int:
        return self.value[0]

    @property
    def scale(self) -> float:
        return self.value[1]


class SkewMatrix:
    """Real skew-symmetric deformation matrix.

    Only the strict upper triangle of the input is read; the lower triangle is
    mirrored from it so skewness holds exactly.
    """

    def __init__(self, entries):
        a = np.array(entries, dtype=float)
        if a.ndim == 0:
            a = np.array([[0.0, float(a)], [-float(a), 0.0]])
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"theta must be square, got shape {a.shape}")
        if not np.allclose(a, -a.T, atol=1e-12, rtol=0):
            raise ValueError("theta is not skew-symmetric")
        upper = np.triu(a, 1)
        self._m = upper - upper.T
        self._m.setflags(write=False)

    @classmethod
    def scalar(cls, t: float) -> "SkewMatrix":
        """2-d matrix ``[[0, t], [-t, 0]]``."""
        return cls([[0.0, t], [-t, 0.0]])

    @property
    def n(self) -> int:
        return self._m.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    def __getitem__(self, idx):
        return self._m[idx]

    def __eq__(self, other) -> bool:
        return isinstance(other, SkewMatrix) and np.array_equal(self._m, other._m)

    def __hash__(self):
        return hash(self._m.tobytes())

    def __neg__(self) -> "SkewMatrix":
        return SkewMatrix(-self._m)

    def __repr__(self) -> str:
        return f"SkewMatrix({self._m.tolist()})"

    def to_json(self) -> list:
        return self._m.tolist()

    @classmethod
    def from_json(cls, data) -> "SkewMatrix":
        return cls(np.array(data, dtype=float))


def _as_lattice(x, n: int) -> Lattice:
    t = tuple(int(v) for v in np.asarray(x).reshape(-1))
    if len(t) != n:
        raise ValueError(f"lattice point {t} has dimension {len(t)}, expected {n}")
    return t


def cocycle_value(theta: SkewMatrix, convention: Convention, x, y) -> complex:
    """``omega(x, y)`` for ``x, y`` in ``Z^n``."""
    n = theta.n
    xv = np.array(_as_lattice(x, n), dtype=float)
    yv = np.array(_as_lattice(y, n), dtype=float)
    return complex(e(convention.sign * convention.scale * (yv @ theta.matrix @ xv)))


class AlgebraElement:
    """Finite sum ``sum_l a(l) delta_l`` in ``C*(Z^n, omega)``."""

    __slots__ = ("theta", "convention", "_c")

    def __init__(self, theta: SkewMatrix, coeffs: Mapping = None,
                 convention: Convention = Convention.PRESENTATION):
        self.theta = theta
        self.convention = convention
        n = theta.n
        c: Dict[Lattice, complex] = {}
        for k, v in (coeffs or {}).items():
            v = complex(v)
            if v != 0:
                key = _as_lattice(k, n)
                c[key] = c.get(key, 0) + v
        self._c = {k: v for k, v in c.items() if v != 0}

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, theta, convention=Convention.PRESENTATION):
        return cls(theta, {}, convention)

    @classmethod
    def one(cls, theta, convention=Convention.PRESENTATION):
        return cls(theta, {(0,) * theta.n: 1.0}, convention)

    @classmethod
    def basis(cls, theta, l, convention=Convention.PRESENTATION, coeff=1.0):
        return cls(theta, {_as_lattice(l, theta.n): coeff}, convention)

    @classmethod
    def generator(cls, theta, i: int, convention=Convention.PRESENTATION, power: int = 1):
        """``U_i^power`` with 1-based ``i``."""
        l = [0] * theta.n
        l[i - 1] = power
        return cls.basis(theta, l, convention)

    @classmethod
    def monomial(cls, theta, exps: Sequence[int], convention=Convention.PRESENTATION):
        """Normal-ordered ``U_1^{l_1} ... U_n^{l_n}``."""
        out = cls.one(theta, convention)
        for i, k in enumerate(exps):
            if k:
                out = out * cls.generator(theta, i + 1, convention, int(k))
        return out

    # -- access -------------------------------------------------------------
    @property
    def n(self) -> int:
        return self.theta.n

    @property
    def coeffs(self) -> Dict[Lattice, complex]:
        return dict(self._c)

    def support(self):
        return set(self._c)

    def __getitem__(self, l) -> complex:
        return self._c.get(_as_lattice(l, self.n), 0j)

    def __iter__(self):
        return iter(self._c.items())

    def __len__(self):
        return len(self._c)

    def _check(self, other: "AlgebraElement"):
        if not isinstance(other, AlgebraElement):
            raise TypeError(f"expected AlgebraElement, got {type(other).__name__}")
        if other.theta != self.theta or other.convention != self.convention:
            raise ValueError("theta/convention mismatch between algebra elements")

    def _new(self, coeffs) -> "AlgebraElement":
        return AlgebraElement(self.theta, coeffs, self.convention)

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = AlgebraElement.one(self.theta, self.convention) * other
        self._check(other)
        c = dict(self._c)
        for k, v in other._c.items():
            c[k] = c.get(k, 0) + v
        return self._new(c)

    __radd__ = __add__

    def __neg__(self):
        return self._new({k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self._new({k: v * other for k, v in self._c.items()})
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self._new({k: v * other for k, v in self._c.items()})
        return NotImplemented

    def __truediv__(self, z):
        return self * (1.0 / z)

    def star(self) -> "AlgebraElement":
        return involution(self)

    def trace(self) -> complex:
        return canonical_trace(self)

    def norm1(self) -> float:
        return float(sum(abs(v) for v in self._c.values()))

    def norm2(self) -> float:
        """``tau(a* a)^{1/2}``, the l^2 norm of the coefficients."""
        return float(np.sqrt(sum(abs(v) ** 2 for v in self._c.values())))

    def max_abs(self) -> float:
        return max((abs(v) for v in self._c.values()), default=0.0)

    def allclose(self, other: "AlgebraElement", tol: float = EXACT_TOL) -> bool:
        return (self - other).max_abs() <= tol

    def truncated(self, radius: int) -> "AlgebraElement":
        return self._new({k: v for k, v in self._c.items() if max(map(abs, k), default=0) <= radius})

    def pruned(self, tol: float) -> "AlgebraElement":
        return self._new({k: v for k, v in self._c.items() if abs(v) > tol})

    def __repr__(self) -> str:
        terms = ", ".join(f"{k}: {v:.6g}" for k, v in sorted(self._c.items()))
        return f"AlgebraElement({{{terms}}})"

    # -- serialisation -----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "theta": self.theta.to_json(),
            "convention": self.convention.name,
            "terms": [{"l": list(k), "re": v.real, "im": v.imag} for k, v in sorted(self._c.items())],
        }

    @classmethod
    def from_json(cls, data: dict) -> "AlgebraElement":
        theta = SkewMatrix.from_json(data["theta"])
        conv = Convention[data.get("convention", "PRESENTATION")]
        return cls(theta, {tuple(t["l"]): complex(t["re"], t["im"]) for t in data["terms"]}, conv)


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Twisted convolution ``(ab)(l) = sum_{x+y=l} a(x) b(y) omega(x, y)``."""
    a._check(b)
    if not a._c or not b._c:
        return a._new({})
    th = a.theta.matrix
    w = a.convention.sign * a.convention.scale
    xs = np.array(list(a._c), dtype=float)
    ys = np.array(list(b._c), dtype=float)
    av = np.array(list(a._c.values()))
    bv = np.array(list(b._c.values()))
    # omega(x, y) = e(w * y^T theta x) for all pairs at once
    phase = e(w * (ys @ th @ xs.T)).T
    amp = av[:, None] * bv[None, :] * phase
    out: Dict[Lattice, complex] = {}
    xk = list(a._c)
    yk = list(b._c)
    for i, x in enumerate(xk):
        for j, y in enumerate(yk):
            key = tuple(p + q for p, q in zip(x, y))
            out[key] = out.get(key, 0) + amp[i, j]
    return a._new(out)


def involution(a: AlgebraElement) -> AlgebraElement:
    """``a*(l) = conj(a(-l)) conj(omega(l, -l))``."""
    out = {}
    for k, v in a._c.items():
        neg = tuple(-x for x in k)
        out[neg] = np.conj(v) * np.conj(cocycle_value(a.theta, a.convention, neg, k))
    return a._new(out)


def canonical_trace(a: AlgebraElement) -> complex:
    return a._c.get((0,) * a.n, 0j)


# ---------------------------------------------------------------------------
# Finite cyclic actions


def _matrix_order(W: np.ndarray, max_order: int = 64) -> int:
    P = np.eye(W.shape[0], dtype=np.int64)
    for r in range(1, max_order + 1):
        P = P @ W
        if np.array_equal(P, np.eye(W.shape[0], dtype=np.int64)):
            return r
    raise ValueError(f"W has no finite order <= {max_order}")


@dataclass(frozen=True)
class FiniteCyclicAction:
    """Integer matrix ``W`` of finite order with ``W^T theta W = theta``."""

    W: np.ndarray
    theta: SkewMatrix
    order: int = field(default=0)

    def __post_init__(self):
        W = np.array(self.W)
        if not np.allclose(W, np.round(W)):
            raise ValueError("W must have integer entries")
        W = np.round(W).astype(np.int64)
        if W.shape != (self.theta.n, self.theta.n):
            raise ValueError("W and theta dimensions differ")
        r = _matrix_order(W)
        if self.order and self.order != r:
            raise ValueError(f"declared order {self.order} but W has order {r}")
        res = np.max(np.abs(W.T @ self.theta.matrix @ W - self.theta.matrix), initial=0.0)
        if res > EXACT_TOL:
            raise ValueError(f"W is not theta-symplectic (residual {res:.3g})")
        W.setflags(write=False)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "order", r)


class Automorphism:
    """``alpha(delta_l) = chi(l) delta_{W l}`` for a character ``chi`` of Z^n.

    Any such map is a *-automorphism when ``W`` is theta-symplectic, since the
    cocycle is a bicharacter built from theta.
    """

    def __init__(self, W, theta: SkewMatrix, convention: Convention, char_phases=None):
        self.W = np.round(np.array(W)).astype(np.int64)
        self.theta = theta
        self.convention = convention
        # chi(e_i) = e(char_phases[i]); stored as exponents to keep phases exact
        self.char_phases = np.zeros(theta.n) if char_phases is None else np.asarray(char_phases, float)

    def chi(self, l) -> complex:
        return complex(e(float(np.dot(self.char_phases, l))))

    def __call__(self, a: AlgebraElement) -> AlgebraElement:
        if a.theta != self.theta or a.convention != self.convention:
            raise ValueError("automorphism applied to an element of a different algebra")
        out = {}
        for k, v in a:
            out[tuple(int(x) for x in self.W @ np.array(k))] = v * self.chi(k)
        return AlgebraElement(self.theta, out, self.convention)

    def compose(self, other: "Automorphism") -> "Automorphism":
        """``self o other``."""
        # (self o other)(delta_l) = chi_o(l) chi_s(W_o l) delta_{W_s W_o l}
        phases = other.char_phases + other.W.T @ self.char_phases
        return Automorphism(self.W @ other.W, self.theta, self.convention, phases)

    def power(self, k: int) -> "Automorphism":
        if k < 0:
            return self.inverse().power(-k)
        out = Automorphism(np.eye(self.theta.n), self.theta, self.convention)
        for _ in range(k):
            out = self.compose(out)
        return out

    def inverse(self) -> "Automorphism":
        Winv = np.round(np.linalg.inv(self.W)).astype(np.int64)
        # alpha^{-1}(delta_m) = conj(chi(W^{-1} m)) delta_{W^{-1} m}
        return Automorphism(Winv, self.theta, self.convention, -(Winv.T @ self.char_phases))


def normal_order_phase(theta: SkewMatrix, convention: Convention, m) -> complex:
    """``c`` with ``U_1^{m_1} ... U_n^{m_n} = c * delta_m``."""
    mono = AlgebraElement.monomial(theta, m, convention)
    return mono[tuple(m)]


def build_action(action: FiniteCyclicAction, convention: Convention = Convention.PRESENTATION) -> Automorphism:
    """The automorphism defined on generators by the formula

    ``alpha(U_i) = e(sum_{k>j} a_ki a_ji theta_jk) U_1^{a_1i} ... U_n^{a_ni}``

    with the monomial normal ordered, extended multiplicatively.
    """
    W, th = action.W, action.theta.matrix
    n = th.shape[0]
    phases = np.zeros(n)
    for i in range(n):
        col = W[:, i]
        ph = sum(col[k] * col[j] * th[j, k] for k in range(1, n) for j in range(k))
        c = normal_order_phase(action.theta, convention, col)
        phases[i] = ph + np.angle(c) / (2 * np.pi)
    return Automorphism(W, action.theta, convention, phases)


def lattice_action(W, theta: SkewMatrix, convention: Convention = Convention.PRESENTATION) -> Automorphism:
    """``delta_l -> delta_{W l}`` (equivalently ``phi -> phi(W^{-1} .)``)."""
    return Automorphism(W, theta, convention)


# ---------------------------------------------------------------------------
# Crossed products A_theta x| Z_r


class OrbifoldElement:
    """``sum_g a_g delta_g`` in ``A_theta x|_alpha Z_r`` (``g`` an exponent of W)."""

    def __init__(self, alpha: Automorphism, order: int, parts: Mapping[int, AlgebraElement] = None):
        self.alpha = alpha
        self.order = int(order)
        self.parts: Dict[int, AlgebraElement] = {}
        for g, a in (parts or {}).items():
            g = int(g) % self.order
            if a.theta != alpha.theta or a.convention != alpha.convention:
                raise ValueError("part lives in a different algebra")
            self.parts[g] = self.parts[g] + a if g in self.parts else a

    @classmethod
    def from_algebra(cls, alpha, order, a: AlgebraElement, g: int = 0):
        return cls(alpha, order, {g: a})

    @classmethod
    def group_unitary(cls, alpha, order, g: int = 1):
        return cls(alpha, order, {g: AlgebraElement.one(alpha.theta, alpha.convention)})

    def part(self, g: int) -> AlgebraElement:
        return self.parts.get(g % self.order, AlgebraElement.zero(self.alpha.theta, self.alpha.convention))

    def _check(self, other):
        if not isinstance(other, OrbifoldElement):
            raise TypeError("expected OrbifoldElement")
        if other.order != self.order or not np.array_equal(other.alpha.W, self.alpha.W) \
                or other.alpha.theta != self.alpha.theta or other.alpha.convention != self.alpha.convention \
                or not np.allclose(other.alpha.char_phases, self.alpha.char_phases):
            raise ValueError("crossed-product elements use different actions")

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = OrbifoldElement.from_algebra(self.alpha, self.order,
                                                 AlgebraElement.one(self.alpha.theta, self.alpha.convention) * other)
        self._check(other)
        parts = dict(self.parts)
        for g, a in other.parts.items():
            parts[g] = parts[g] + a if g in parts else a
        return OrbifoldElement(self.alpha, self.order, parts)

    __radd__ = __add__

    def __neg__(self):
        return OrbifoldElement(self.alpha, self.order, {g: -a for g, a in self.parts.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return OrbifoldElement(self.alpha, self.order, {g: a * other for g, a in self.parts.items()})
        return crossed_multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self * other
        return NotImplemented

    def star(self) -> "OrbifoldElement":
        return crossed_involution(self)

    def trace(self) -> complex:
        return canonical_trace_orbifold(self)

    def max_abs(self) -> float:
        return max((a.max_abs() for a in self.parts.values()), default=0.0)

    def allclose(self, other, tol=EXACT_TOL) -> bool:
        return (self - other).max_abs() <= tol

    def __repr__(self):
        return f"OrbifoldElement(order={self.order}, parts={self.parts})"


def crossed_multiply(x: OrbifoldElement, y: OrbifoldElement) -> OrbifoldElement:
    """``(a delta_g)(b delta_h) = a alpha_g(b) delta_{g+h}``."""
    x._check(y)
    out: Dict[int, AlgebraElement] = {}
    for g, a in x.parts.items():
        ag = x.alpha.power(g)
        for h, b in y.parts.items():
            k = (g + h) % x.order
            term = a * ag(b)
            out[k] = out[k] + term if k in out else term
    return OrbifoldElement(x.alpha, x.order, out)


def crossed_involution(x: OrbifoldElement) -> OrbifoldElement:
    """``(a delta_g)* = alpha_{g^{-1}}(a*) delta_{g^{-1}}``."""
    out = {}
    for g, a in x.parts.items():
        ginv = (-g) % x.order
        out[ginv] = x.alpha.power(ginv)(a.star())
    return OrbifoldElement(x.alpha, x.order, out)


def canonical_trace_orbifold(x: OrbifoldElement) -> complex:
    return canonical_trace(x.part(0))


# ---------------------------------------------------------------------------
# helpers used by tests and suites


def random_element(theta: SkewMatrix, rng: np.random.Generator, terms: int = 4, radius: int = 2,
                   convention: Convention = Convention.PRESENTATION) -> AlgebraElement:
    pts = rng.integers(-radius, radius + 1, size=(terms, theta.n))
    vals = rng.normal(size=terms) + 1j * rng.normal(size=terms)
    return AlgebraElement(theta, {tuple(p): v for p, v in zip(pts, vals)}, convention)


def lattice_box(n: int, radius: int) -> Iterable[Lattice]:
    return itertools.product(range(-radius, radius + 1), repeat=n)


def random_skew(n: int, rng: np.random.Generator, scale: float = 1.0) -> SkewMatrix:
    a = rng.normal(scale=scale, size=(n, n))
    return SkewMatrix(a - a.T)
