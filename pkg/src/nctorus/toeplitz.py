"""Truncated Toeplitz extensions over the free product ``Z_2 * Z_2``.

The group ``Z_2 * Z_2 = <g, s>`` acts on a coefficient algebra ``A`` by the
same involution ``beta`` from both factors.  The word set

    P = {e, g, sg, gsg, sgsg, ...} = P_1 u P_2,
    P_1 = {(sg)^n},  P_2 = {g (sg)^n},

is identified with two copies of ``Z>=0`` by counting ``sg`` pairs; that count
is the *layer* of a word.  A truncation of size ``N`` keeps layers ``0..N-1``.

Three objects are compared:

* ``T^A_P``, generated on ``l^2(P, A)`` by ``iota_2(a) xi(x) = beta^{|x|}(a) xi(x)``,
  ``iota_2(g) xi(x) = xi(gx)`` and ``iota_2(s) xi(x) = xi(sx)`` (zero when
  ``sx`` leaves ``P``);
* the Toeplitz algebra ``T^A`` on ``l^2(Z>=0, A)`` with right shift ``S``;
* the crossed product ``A x| (Z_2 * Z_2) = (A (x) C(T)) x| Z_2`` with ``u = sg``
  and ``W = g``, realized as the flip crossed product of the torus with one
  extra central generator ``u``.

``P_T`` sends ``iota_2(s), iota_2(g), iota_2(a)`` to ``[[0, S], [S*, 0]]``,
``[[0, 1], [1, 0]]`` and ``diag(a, beta(a))``; ``P_TT`` is the map
``a_0 + a_1 W -> [[a_0, a_1], [beta(a_1), beta(a_0)]]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import (EXACT_TOL, AlgebraElement, Automorphism, Convention, FiniteCyclicAction,
                      OrbifoldElement, SkewMatrix, build_action, random_element)
from .report import CheckResult

Index = Tuple[int, int]


# ---------------------------------------------------------------------------
# Coefficient algebra and its extension by the central unitary u


@dataclass
class CoefficientAlgebra:
    """``A = A_theta`` with an involutive automorphism ``beta`` given by ``W``."""

    theta: SkewMatrix
    W: np.ndarray
    convention: Convention = Convention.PRESENTATION
    beta: Automorphism = field(init=False)

    def __post_init__(self):
        act = FiniteCyclicAction(np.asarray(self.W), self.theta)
        if act.order not in (1, 2):
            raise ValueError("beta must be an involution")
        self.beta = build_action(act, self.convention)

    @classmethod
    def flip(cls, theta12: float, convention: Convention = Convention.PRESENTATION) -> "CoefficientAlgebra":
        return cls(SkewMatrix.scalar(theta12), -np.eye(2, dtype=np.int64), convention)

    @classmethod
    def scalars(cls, convention: Convention = Convention.PRESENTATION) -> "CoefficientAlgebra":
        """``A = C``, realized as the multiples of 1 in a 1-d torus with trivial ``beta``."""
        return cls(SkewMatrix(np.zeros((1, 1))), np.eye(1, dtype=np.int64), convention)

    @property
    def n(self) -> int:
        return self.theta.n

    def one(self) -> AlgebraElement:
        return AlgebraElement.one(self.theta, self.convention)

    def zero(self) -> AlgebraElement:
        return AlgebraElement.zero(self.theta, self.convention)

    def random(self, rng: np.random.Generator, terms: int = 3, radius: int = 3) -> AlgebraElement:
        if self.is_scalar:
            return self.one() * complex(rng.normal() + 1j * rng.normal())
        return random_element(self.theta, rng, terms, radius, self.convention)

    @property
    def is_scalar(self) -> bool:
        return self.n == 1 and np.array_equal(self.W, np.eye(1))

    # -- A (x) C(T) ---------------------------------------------------------
    @property
    def ambient_theta(self) -> SkewMatrix:
        m = np.zeros((self.n + 1, self.n + 1))
        m[:self.n, :self.n] = self.theta.matrix
        return SkewMatrix(m)

    def ambient_flip(self) -> Automorphism:
        """``beta`` on ``A`` and ``u -> u^{-1}``; restricts to ``beta`` exactly."""
        n = self.n
        W = np.zeros((n + 1, n + 1), dtype=np.int64)
        W[:n, :n] = self.beta.W
        W[n, n] = -1
        return Automorphism(W, self.ambient_theta, self.convention, np.append(self.beta.char_phases, 0.0))

    def embed(self, a: AlgebraElement, u_power: int = 0) -> AlgebraElement:
        """``a u^k`` in ``A (x) C(T)``."""
        return AlgebraElement(self.ambient_theta, {k + (u_power,): v for k, v in a}, self.convention)

    def u(self, power: int = 1) -> AlgebraElement:
        return self.embed(self.one(), power)

    def fourier_mode(self, x: AlgebraElement, k: int) -> AlgebraElement:
        """Coefficient of ``u^k`` in ``x``, as an element of ``A``."""
        return AlgebraElement(self.theta, {key[:-1]: v for key, v in x if key[-1] == k}, self.convention)


# ---------------------------------------------------------------------------
# Words of Z_2 * Z_2


def reduce_word(w: str) -> str:
    """Free reduction in ``<g, s | g^2 = s^2 = 1>``."""
    out: List[str] = []
    for c in w:
        if c not in "gs":
            raise ValueError(f"unknown letter {c!r}")
        if out and out[-1] == c:
            out.pop()
        else:
            out.append(c)
    return "".join(out)


def in_P(w: str) -> bool:
    return w == "" or w.endswith("g")


def word_index(w: str) -> Index:
    """``(block, layer)`` of a word of ``P``: block 0 for ``P_1``, 1 for ``P_2``."""
    if not in_P(w):
        raise ValueError(f"{w!r} is not in P")
    return len(w) % 2, len(w) // 2


def index_word(block: int, layer: int) -> str:
    return ("g" if block else "") + "sg" * layer


def word_basis(N: int) -> List[str]:
    """Words of ``P`` with layer ``< N``, ordered by length."""
    return [index_word(k % 2, k // 2) for k in range(2 * N)]


# ---------------------------------------------------------------------------
# Sparse operators with entries in A


class SparseOp:
    """Finite matrix ``{(row, col): a}`` with entries in a fixed algebra."""

    def __init__(self, size: int, entries: Dict[Index, AlgebraElement], theta: SkewMatrix,
                 convention: Convention):
        self.size = int(size)
        self.theta = theta
        self.convention = convention
        self.entries = {k: v for k, v in entries.items() if len(v)}

    @classmethod
    def identity(cls, size, theta, convention):
        one = AlgebraElement.one(theta, convention)
        return cls(size, {(i, i): one for i in range(size)}, theta, convention)

    @classmethod
    def zero(cls, size, theta, convention):
        return cls(size, {}, theta, convention)

    def _new(self, entries):
        return SparseOp(self.size, entries, self.theta, self.convention)

    def __add__(self, other: "SparseOp") -> "SparseOp":
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out[k] + v if k in out else v
        return self._new(out)

    def __neg__(self):
        return self._new({k: -v for k, v in self.entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, z):
        return self._new({k: v * z for k, v in self.entries.items()})

    def __matmul__(self, other: "SparseOp") -> "SparseOp":
        if other.size != self.size:
            raise ValueError("size mismatch")
        rows: Dict[int, List[Tuple[int, AlgebraElement]]] = {}
        for (k, j), b in other.entries.items():
            rows.setdefault(k, []).append((j, b))
        out: Dict[Index, AlgebraElement] = {}
        for (i, k), a in self.entries.items():
            for j, b in rows.get(k, ()):
                t = a * b
                out[(i, j)] = out[(i, j)] + t if (i, j) in out else t
        return self._new(out)

    def adjoint(self) -> "SparseOp":
        return self._new({(j, i): v.star() for (i, j), v in self.entries.items()})

    def max_abs(self) -> float:
        return max((v.max_abs() for v in self.entries.values()), default=0.0)

    def nonzero(self, tol: float = EXACT_TOL) -> "SparseOp":
        """Drop entries whose coefficients are all below ``tol``."""
        return self._new({k: v for k, v in self.entries.items() if v.max_abs() > tol})

    def pruned_max(self, tol: float = EXACT_TOL) -> float:
        return self.nonzero(tol).max_abs()

    def restrict(self, rows=None, cols=None) -> "SparseOp":
        rs = None if rows is None else set(rows)
        cs = None if cols is None else set(cols)
        return self._new({(i, j): v for (i, j), v in self.entries.items()
                          if (rs is None or i in rs) and (cs is None or j in cs)})

    def permuted(self, perm: Sequence[int]) -> "SparseOp":
        """Conjugate by the basis map ``i -> perm[i]``."""
        return self._new({(perm[i], perm[j]): v for (i, j), v in self.entries.items()})

    def support(self) -> set:
        """Basis indices touched by some entry, as a row or a column."""
        return {i for ij in self.entries for i in ij}


def _block_index(N: int, block: int, layer: int) -> int:
    return block * N + layer


def block_layer(N: int, i: int) -> int:
    return i % N


# ---------------------------------------------------------------------------
# Truncated representations


@dataclass
class TruncatedRep:
    """Generators of one algebra on a truncation with ``N`` layers."""

    N: int
    basis: List[str]
    coeffs: CoefficientAlgebra
    operators: Dict[str, SparseOp]
    layout: str

    def coefficient(self, a: AlgebraElement) -> SparseOp:
        """Image of ``a`` in ``A`` under the coefficient embedding."""
        return _coefficient_op(self, a)

    def layer_of(self, i: int) -> int:
        if self.layout == "words":
            return word_index(self.basis[i])[1]
        return i % self.N


def _coefficient_op(rep: TruncatedRep, a: AlgebraElement) -> SparseOp:
    A = rep.coeffs
    beta_a = A.beta(a)
    ents = {}
    for i, w in enumerate(rep.basis):
        if rep.layout == "toeplitz":
            ents[(i, i)] = a
        else:
            # alpha_{x^{-1}}(a) with both letters acting by beta
            ents[(i, i)] = beta_a if len(w) % 2 else a
    return SparseOp(len(rep.basis), ents, A.theta, A.convention)


def _word_op(basis: List[str], letter: str, A: CoefficientAlgebra) -> SparseOp:
    """``xi -> xi(letter . x)`` restricted to the truncated word basis."""
    pos = {w: i for i, w in enumerate(basis)}
    one = A.one()
    ents = {}
    for i, x in enumerate(basis):
        y = reduce_word(letter + x)
        if in_P(y) and y in pos:
            ents[(i, pos[y])] = one
    return SparseOp(len(basis), ents, A.theta, A.convention)


def build_word_rep(A: CoefficientAlgebra, N: int) -> TruncatedRep:
    """``iota_2(g)``, ``iota_2(s)`` on ``l^2(P, A)`` truncated to ``N`` layers, by the word action."""
    if N < 4:
        raise ValueError("N must be at least 4")
    basis = word_basis(N)
    ops = {"g": _word_op(basis, "g", A), "s": _word_op(basis, "s", A)}
    return TruncatedRep(N, basis, A, ops, "words")


def build_toeplitz(A: CoefficientAlgebra, N: int) -> TruncatedRep:
    """Right shift ``S (xi)(n) = xi(n - 1)`` on ``l^2({0..N-1}, A)``."""
    if N < 4:
        raise ValueError("N must be at least 4")
    one = A.one()
    S = SparseOp(N, {(n, n - 1): one for n in range(1, N)}, A.theta, A.convention)
    return TruncatedRep(N, [str(n) for n in range(N)], A, {"S": S, "S*": S.adjoint()}, "toeplitz")


def shift_defects(rep: TruncatedRep) -> Dict[str, SparseOp]:
    """``S*S - I`` and ``SS* - I`` on the truncation (``-e_{N-1}`` and ``-e_0``)."""
    S, Sa = rep.operators["S"], rep.operators["S*"]
    I = SparseOp.identity(rep.N, rep.coeffs.theta, rep.coeffs.convention)
    return {"S*S-I": Sa @ S - I, "SS*-I": S @ Sa - I}


def block_permutation(N: int) -> List[int]:
    """``P_K``: word position ``2n + b`` goes to block position ``b N + n``."""
    return [_block_index(N, k % 2, k // 2) for k in range(2 * N)]


def PK(op: SparseOp, N: int) -> SparseOp:
    """``l^2(P) = l^2(P_1) + l^2(P_2)``, each identified with ``l^2(Z>=0)``."""
    return op.permuted(block_permutation(N))


def _blocks(N: int, A: CoefficientAlgebra, blocks: Dict[Tuple[int, int], SparseOp]) -> SparseOp:
    ents = {}
    for (bi, bj), op in blocks.items():
        for (i, j), v in op.entries.items():
            ents[(_block_index(N, bi, i), _block_index(N, bj, j))] = v
    return SparseOp(2 * N, ents, A.theta, A.convention)


def build_PT(A: CoefficientAlgebra, N: int):
    """``P_T`` on generators, as ``2N x 2N`` block operators over the truncated ``T^A``."""
    T = build_toeplitz(A, N)
    S, Sa = T.operators["S"], T.operators["S*"]
    I = SparseOp.identity(N, A.theta, A.convention)

    def image(letter, a: Optional[AlgebraElement] = None) -> SparseOp:
        if letter == "s":
            return _blocks(N, A, {(0, 1): S, (1, 0): Sa})
        if letter == "g":
            return _blocks(N, A, {(0, 1): I, (1, 0): I})
        if letter == "a":
            return _blocks(N, A, {(0, 0): T.coefficient(a), (1, 1): T.coefficient(A.beta(a))})
        raise ValueError(f"unknown generator {letter!r}")

    return image


def build_PK(N: int):
    return lambda op: PK(op, N)


# ---------------------------------------------------------------------------
# Symbol level: M_2 over A (x) C(T) and the crossed product


Mat2 = List[List[AlgebraElement]]


def mat2_mul(x: Mat2, y: Mat2) -> Mat2:
    return [[x[i][0] * y[0][j] + x[i][1] * y[1][j] for j in range(2)] for i in range(2)]


def mat2_sub(x: Mat2, y: Mat2) -> Mat2:
    return [[x[i][j] - y[i][j] for j in range(2)] for i in range(2)]


def mat2_star(x: Mat2) -> Mat2:
    return [[x[j][i].star() for j in range(2)] for i in range(2)]


def mat2_max_abs(x: Mat2) -> float:
    return max(x[i][j].max_abs() for i in range(2) for j in range(2))


def mat2_identity(theta, convention) -> Mat2:
    one, zero = AlgebraElement.one(theta, convention), AlgebraElement.zero(theta, convention)
    return [[one, zero], [zero, one]]


def build_p_map(alpha: Automorphism):
    """``p(a_0 + a_1 W) = [[a_0, a_1], [beta(a_1), beta(a_0)]]`` on ``A x|_beta Z_2``."""
    def p(x: OrbifoldElement) -> Mat2:
        if x.order != 2:
            raise ValueError("p is defined on Z_2 crossed products")
        a0, a1 = x.part(0), x.part(1)
        return [[a0, a1], [alpha(a1), alpha(a0)]]
    return p


def check_p_map(alpha: Automorphism, rng: np.random.Generator, samples: int = 100, radius: int = 2,
                tol: float = EXACT_TOL) -> List[CheckResult]:
    """Unitality, ``p(w) = [[0, 1], [1, 0]]``, multiplicativity and ``*``-compatibility."""
    p = build_p_map(alpha)
    th, conv = alpha.theta, alpha.convention
    one = OrbifoldElement.group_unitary(alpha, 2, 0)
    w = OrbifoldElement.group_unitary(alpha, 2, 1)
    I = mat2_identity(th, conv)
    swap = [[I[0][1], I[0][0]], [I[0][0], I[0][1]]]
    out = [CheckResult.make("p-map/unit", mat2_max_abs(mat2_sub(p(one), I)), tol),
           CheckResult.make("p-map/w", mat2_max_abs(mat2_sub(p(w), swap)), tol)]
    mult = star = 0.0
    for _ in range(samples):
        x, y = (OrbifoldElement(alpha, 2, {g: random_element(th, rng, 3, radius, conv) for g in (0, 1)})
                for _ in range(2))
        mult = max(mult, mat2_max_abs(mat2_sub(p(x * y), mat2_mul(p(x), p(y)))))
        star = max(star, mat2_max_abs(mat2_sub(p(x.star()), mat2_star(p(x)))))
    out.append(CheckResult.make("p-map/multiplicative", mult, tol, f"{samples} random pairs"))
    out.append(CheckResult.make("p-map/star", star, tol, f"{samples} random elements"))
    return out


def build_PTT(A: CoefficientAlgebra):
    """``P_TT = p`` on ``(A (x) C(T)) x| Z_2``."""
    return build_p_map(A.ambient_flip())


# A word in the generators of T^A_P: letters "g", "s", or ("a", element)
Letter = object


def _letter_name(x: Letter) -> str:
    return x if isinstance(x, str) else "a"


def symbol_via_PT(A: CoefficientAlgebra, word: Sequence[Letter]) -> Mat2:
    """``psi o P_T``: multiply the symbols ``[[0, u], [u*, 0]]``, ``[[0, 1], [1, 0]]``, ``diag(a, beta a)``."""
    th, conv = A.ambient_theta, A.convention
    one, zero = AlgebraElement.one(th, conv), AlgebraElement.zero(th, conv)
    out = mat2_identity(th, conv)
    for x in word:
        name = _letter_name(x)
        if name == "s":
            m = [[zero, A.u(1)], [A.u(-1), zero]]
        elif name == "g":
            m = [[zero, one], [one, zero]]
        else:
            a = x[1]
            m = [[A.embed(a), zero], [zero, A.embed(A.beta(a))]]
        out = mat2_mul(out, m)
    return out


def quotient_image(A: CoefficientAlgebra, word: Sequence[Letter]) -> OrbifoldElement:
    """``pi``: ``g -> W``, ``s -> u W`` (since ``s = (sg) g``), ``a -> a``."""
    alpha = A.ambient_flip()
    W = OrbifoldElement.group_unitary(alpha, 2)
    out = OrbifoldElement.group_unitary(alpha, 2, 0)
    for x in word:
        name = _letter_name(x)
        if name == "s":
            m = OrbifoldElement.from_algebra(alpha, 2, A.u(1)) * W
        elif name == "g":
            m = W
        else:
            m = OrbifoldElement.from_algebra(alpha, 2, A.embed(x[1]))
        out = out * m
    return out


def symbol_via_quotient(A: CoefficientAlgebra, word: Sequence[Letter]) -> Mat2:
    """``P_TT o pi``."""
    return build_PTT(A)(quotient_image(A, word))


def toeplitz_of_symbol(A: CoefficientAlgebra, X: Mat2, N: int) -> SparseOp:
    """Entrywise Toeplitz compression: block ``(i, j)`` has ``(m, n)`` entry ``X_ij`` at ``u^{m-n}``."""
    ents = {}
    for bi in range(2):
        for bj in range(2):
            modes = {key[-1] for key, _ in X[bi][bj]}
            for k in modes:
                c = A.fourier_mode(X[bi][bj], k)
                for n in range(N):
                    m = n + k
                    if 0 <= m < N:
                        ents[(_block_index(N, bi, m), _block_index(N, bj, n))] = c
    return SparseOp(2 * N, ents, A.theta, A.convention)


def read_symbol(A: CoefficientAlgebra, op: SparseOp, N: int, layer: int) -> Mat2:
    """Quotient map on a truncated operator: read ``u^k`` from column ``layer`` of each block."""
    th, conv = A.ambient_theta, A.convention
    X = [[AlgebraElement.zero(th, conv) for _ in range(2)] for _ in range(2)]
    for (i, j), v in op.entries.items():
        if block_layer(N, j) != layer:
            continue
        bi, bj = i // N, j // N
        X[bi][bj] = X[bi][bj] + A.embed(v, block_layer(N, i) - layer)
    return X


# ---------------------------------------------------------------------------
# Words, truncations and the diagram


def word_operator(A: CoefficientAlgebra, word: Sequence[Letter], N: int) -> SparseOp:
    """Product of the truncated ``P_T`` images (block layout, ``N`` layers)."""
    image = build_PT(A, N)
    out = SparseOp.identity(2 * N, A.theta, A.convention)
    for x in word:
        name = _letter_name(x)
        out = out @ (image("a", x[1]) if name == "a" else image(name))
    return out


def shift_count(word: Sequence[Letter]) -> int:
    return sum(_letter_name(x) == "s" for x in word)


def compress(op: SparseOp, N: int) -> SparseOp:
    """Compress a block operator on ``M >= N`` layers to the first ``N`` layers."""
    M = op.size // 2
    ents = {}
    for (i, j), v in op.entries.items():
        li, lj = i % M, j % M
        if li < N and lj < N:
            ents[(_block_index(N, i // M, li), _block_index(N, j // M, lj))] = v
    return SparseOp(2 * N, ents, op.theta, op.convention)


def exact_compression(A: CoefficientAlgebra, word: Sequence[Letter], N: int) -> SparseOp:
    """Compression of the untruncated operator: layers move by at most one per ``s``."""
    return compress(word_operator(A, word, N + shift_count(word)), N)


def layers_of(op: SparseOp, N: int) -> set:
    return {block_layer(N, i) for i in op.support()}


@dataclass
class DiagramWordReport:
    word: str
    symbolic: float
    quotient: float
    interior: float
    truncation_defect: float
    truncation_layers: Tuple[int, ...]
    ideal_defect: float
    ideal_layers: Tuple[int, ...]


def word_label(word: Sequence[Letter]) -> str:
    return "".join(_letter_name(x) for x in word) or "e"


def diagram_word(A: CoefficientAlgebra, word: Sequence[Letter], N: int) -> DiagramWordReport:
    """Both paths of the square for one word at truncation ``N``.

    * ``symbolic``: ``psi o P_T`` against ``P_TT o pi`` in ``M_2(A (x) C(T))``.
    * ``quotient``: the symbol read from an interior column of the truncated
      ``P_T`` image against ``P_TT o pi``.
    * ``interior``: the truncated image against the Toeplitz compression of
      the symbol on vectors with layers in ``[k, N - k)``, ``k`` the number of ``s``.
    * truncation defect: truncated product minus exact compression.
    * ideal defect: exact compression minus the Toeplitz compression of the
      symbol; it lies in ``A (x) K`` and is killed by the quotient map.
    """
    k = shift_count(word)
    if N < 2 * k + 2:
        raise ValueError("truncation too small for this word")
    sym_T = symbol_via_PT(A, word)
    sym_Q = symbol_via_quotient(A, word)
    trunc = word_operator(A, word, N)
    exact = exact_compression(A, word, N)
    toep = toeplitz_of_symbol(A, sym_Q, N)
    read = read_symbol(A, trunc, N, k)
    interior_cols = [j for j in range(2 * N) if k <= j % N < N - k]
    interior = (trunc - toep).restrict(cols=interior_cols)
    tdef = trunc - exact
    idef = exact - toep
    return DiagramWordReport(word_label(word), mat2_max_abs(mat2_sub(sym_T, sym_Q)),
                             mat2_max_abs(mat2_sub(read, sym_Q)), interior.max_abs(),
                             tdef.pruned_max(), tuple(sorted(layers_of(tdef.nonzero(), N))),
                             idef.pruned_max(), tuple(sorted(layers_of(idef.nonzero(), N))))


def generator_words(A: CoefficientAlgebra, rng: np.random.Generator) -> List[List[Letter]]:
    """Generators and their pairwise products."""
    gens: List[Letter] = ["g", "s", ("a", A.random(rng))]
    return [[x] for x in gens] + [[x, y] for x in gens for y in gens]


def random_words(A: CoefficientAlgebra, rng: np.random.Generator, count: int, max_len: int = 5,
                 max_shifts: int = 2) -> List[List[Letter]]:
    """Random words with at most ``max_shifts`` letters ``s``."""
    words = []
    while len(words) < count:
        L = int(rng.integers(1, max_len + 1))
        w: List[Letter] = []
        for _ in range(L):
            c = rng.choice(["g", "s", "a"])
            w.append(("a", A.random(rng)) if c == "a" else str(c))
        if shift_count(w) <= max_shifts:
            words.append(w)
    return words


def check_diagram(N: int, probes: int = 6, A: Optional[CoefficientAlgebra] = None, seed: int = 0,
                  tol: float = EXACT_TOL) -> Tuple[List[CheckResult], List[DiagramWordReport]]:
    """Commutation of ``P_TT o pi`` with the quotient of ``P_T`` on generators and random words.

    Exact agreement is required on the symbol and on interior vectors; the
    truncation defect must sit in the last two layers and the ideal defect in
    the first two.
    """
    if N < 8:
        raise ValueError("N must be at least 8")
    A = A or CoefficientAlgebra.flip((np.sqrt(5) - 1) / 2)
    rng = np.random.default_rng(seed)
    words = generator_words(A, rng) + random_words(A, rng, probes)
    reports = [diagram_word(A, w, N) for w in words]
    last = set(range(N - 2, N))
    first = set(range(2))
    checks = []
    for i, r in enumerate(reports):
        tag = f"diagram/N={N:02d}/{i:02d}-{r.word}"
        checks.append(CheckResult.make(f"{tag}/symbolic", r.symbolic, tol))
        checks.append(CheckResult.make(f"{tag}/quotient", r.quotient, tol))
        checks.append(CheckResult.make(f"{tag}/interior", r.interior, tol))
        out_t = 0.0 if set(r.truncation_layers) <= last else 1.0
        out_i = 0.0 if set(r.ideal_layers) <= first else 1.0
        checks.append(CheckResult.make(f"{tag}/truncation_support", out_t, 0.0,
                                       f"layers {list(r.truncation_layers)}"))
        checks.append(CheckResult.make(f"{tag}/ideal_support", out_i, 0.0, f"layers {list(r.ideal_layers)}"))
    return checks, reports


def defect_norm_drift(reports_by_N: Dict[int, List[DiagramWordReport]]) -> Tuple[float, float]:
    """Largest change over ``N`` of the truncation and ideal defect norms, word by word."""
    Ns = sorted(reports_by_N)
    dt = di = 0.0
    for rows in zip(*(reports_by_N[n] for n in Ns)):
        t = [r.truncation_defect for r in rows]
        i = [r.ideal_defect for r in rows]
        dt = max(dt, max(t) - min(t))
        di = max(di, max(i) - min(i))
    return dt, di


def check_relations(A: CoefficientAlgebra, N: int, rng: np.random.Generator,
                    tol: float = EXACT_TOL) -> List[CheckResult]:
    """Generator relations of ``T^A_P`` and ``T^A`` with their exact boundary defects."""
    rep = build_word_rep(A, N)
    g, s = rep.operators["g"], rep.operators["s"]
    a = A.random(rng)
    ia, iba = rep.coefficient(a), rep.coefficient(A.beta(a))
    size = 2 * N
    I = SparseOp.identity(size, A.theta, A.convention)
    one = A.one()
    e_first = SparseOp(size, {(0, 0): one}, A.theta, A.convention)
    e_last = SparseOp(size, {(size - 1, size - 1): one}, A.theta, A.convention)
    image = build_PT(A, N)
    out = [
        CheckResult.make("words/g_squared", (g @ g - I).max_abs(), tol),
        CheckResult.make("words/g_selfadjoint", (g.adjoint() - g).max_abs(), tol),
        CheckResult.make("words/s_selfadjoint", (s.adjoint() - s).max_abs(), tol),
        # s^2 = 1 - e_{word e} - e_{last word}
        CheckResult.make("words/s_squared_defect", (s @ s - (I - e_first - e_last)).max_abs(), tol),
        CheckResult.make("words/g_covariance", (g @ ia @ g - iba).max_abs(), tol),
        CheckResult.make("words/s_covariance", (s @ ia @ s - iba @ s @ s).max_abs(), tol),
        CheckResult.make("PK/g", (PK(g, N) - image("g")).max_abs(), tol),
        CheckResult.make("PK/s", (PK(s, N) - image("s")).max_abs(), tol),
        CheckResult.make("PK/a", (PK(ia, N) - image("a", a)).max_abs(), tol),
    ]
    T = build_toeplitz(A, N)
    d = shift_defects(T)
    eN = SparseOp(N, {(N - 1, N - 1): one}, A.theta, A.convention)
    e0 = SparseOp(N, {(0, 0): one}, A.theta, A.convention)
    out.append(CheckResult.make("toeplitz/SaS_defect", (d["S*S-I"] + eN).max_abs(), tol))
    out.append(CheckResult.make("toeplitz/SSa_defect", (d["SS*-I"] + e0).max_abs(), tol))
    return out


def check_ideal(A: CoefficientAlgebra, N: int, layers: int = 2, tol: float = EXACT_TOL) -> CheckResult:
    """``pi o eta = 0`` on the matrix units supported in the first ``layers`` layers."""
    worst = 0.0
    one = A.one()
    idx = [j for j in range(2 * N) if j % N < layers]
    for i in idx:
        for j in idx:
            op = SparseOp(2 * N, {(i, j): one}, A.theta, A.convention)
            for layer in range(layers, N - layers):
                worst = max(worst, mat2_max_abs(read_symbol(A, op, N, layer)))
    return CheckResult.make(f"ideal/N={N:02d}", worst, tol, f"{len(idx) ** 2} matrix units")
