"""Named verification suites shared by the command line and the test-suite."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np

from . import equivariance as eqv
from .algebra import (AlgebraElement, Convention, FiniteCyclicAction, SkewMatrix, build_action, cocycle_value,
                      random_element)
from .gaussian import FunctionState, l2_inner, l2_norm
from .metaplectic import hexic, hexic_general, operator_order, probe_states, scalar_lift
from .module import (inner_A, inner_B, left_act, left_act_element, module_context, relative_residual,
                     right_act, right_act_element)
from .projections import (PROJECTION_TABLE, RieffelData, build_projection, convergence_study,
                          sg_trace_identity, flip_invariant_variant, projection_trace,
                          rieffel_projection)
from .report import CheckResult, Report
from . import toeplitz as tp

FIXTURE_DIR = Path(__file__).parent / "fixtures"
GOLDEN = (np.sqrt(5) - 1) / 2

DEFAULT_TOLERANCES: Dict[str, float] = {
    "exact": 1e-12,
    "closed_form": 1e-10,
    "window": 1e-8,
    "order": 1e-9,
    "flip_extension": 1e-12,
    "imprimitivity": 1e-10,
    "rieffel_idempotence": 1e-3,
    "rieffel_trace": 1e-6,
    "flip_invariance": 1e-10,
    "trace_identity": 2e-3,
}

DEFAULT_TRUNCATIONS: Dict[str, int] = {"lwindow": 1, "N": 32, "fourier_cutoff": 64}


class ConfigError(ValueError):
    """Invalid suite name, fixture, tolerance or truncation."""


@dataclass
class SuiteConfig:
    suite: str
    theta: Optional[SkewMatrix] = None
    theta_label: str = "default"
    seed: int = 0
    tolerances: Dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    truncations: Dict[str, int] = field(default_factory=lambda: dict(DEFAULT_TRUNCATIONS))

    def __post_init__(self):
        if self.suite not in SUITES and self.suite != "all":
            raise ConfigError(f"unknown suite {self.suite!r}")
        for k in self.tolerances:
            if k not in DEFAULT_TOLERANCES:
                raise ConfigError(f"unknown tolerance {k!r}")
        for k in self.truncations:
            if k not in DEFAULT_TRUNCATIONS:
                raise ConfigError(f"unknown truncation {k!r}")
        self.tolerances = {**DEFAULT_TOLERANCES, **self.tolerances}
        self.truncations = {**DEFAULT_TRUNCATIONS, **self.truncations}

    def tol(self, name: str) -> float:
        return self.tolerances[name]

    @property
    def theta_or_default(self) -> SkewMatrix:
        return self.theta if self.theta is not None else load_theta("theta3d")[0]

    @property
    def theta12(self) -> float:
        """``theta_12`` reduced into ``(0, 1)``; the golden ratio conjugate by default."""
        if self.theta is None or self.theta.n < 2:
            return GOLDEN
        t = float(self.theta[0, 1]) % 1.0
        if not 0 < t < 1:
            raise ConfigError("theta_12 must not be an integer for the Rieffel and Toeplitz suites")
        return t


def load_theta(spec: str):
    """``(theta, label)`` from a JSON file or a bundled fixture name."""
    path = Path(spec)
    candidates = [path, FIXTURE_DIR / path.name, FIXTURE_DIR / f"{path.name}.json"]
    src = next((c for c in candidates if c.is_file()), None)
    if src is None:
        raise ConfigError(f"no theta file or fixture named {spec!r}")
    try:
        data = json.loads(src.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {spec!r}: {exc}") from exc
    mat = data.get("matrix") if isinstance(data, dict) else data
    try:
        m = np.array(mat, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{spec!r} does not hold a numeric matrix") from exc
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ConfigError(f"{spec!r} is not a square matrix")
    if not np.allclose(m, -m.T, atol=1e-14):
        raise ConfigError(f"{spec!r} is not antisymmetric")
    return SkewMatrix(m), src.stem


def _fixture_matrix(name: str) -> np.ndarray:
    return np.array(json.loads((FIXTURE_DIR / f"{name}.json").read_text())["matrix"])


# ---------------------------------------------------------------------------
# algebra suites


def suite_cocycle(cfg: SuiteConfig) -> List[CheckResult]:
    """Cocycle identity, associativity, involution and trace over 100 random samples."""
    th = cfg.theta_or_default
    rng = np.random.default_rng(cfg.seed)
    tol = cfg.tol("exact")
    out = []
    for conv in Convention:
        coc = assoc = invol = trace = 0.0
        for _ in range(100):
            x, y, z = (rng.integers(-5, 6, size=th.n) for _ in range(3))
            lhs = cocycle_value(th, conv, x, y) * cocycle_value(th, conv, x + y, z)
            rhs = cocycle_value(th, conv, x, y + z) * cocycle_value(th, conv, y, z)
            coc = max(coc, abs(lhs - rhs))
            a, b, c = (random_element(th, rng, 3, 2, conv) for _ in range(3))
            assoc = max(assoc, ((a * b) * c - a * (b * c)).max_abs())
            invol = max(invol, ((a * b).star() - b.star() * a.star()).max_abs())
            trace = max(trace, abs((a * b).trace() - (b * a).trace()),
                        abs((a.star() * a).trace() - a.norm2() ** 2))
        tag = f"cocycle/{conv.name.lower()}"
        out += [CheckResult.make(f"{tag}/identity", coc, tol, "100 triples"),
                CheckResult.make(f"{tag}/associativity", assoc, tol),
                CheckResult.make(f"{tag}/involution", invol, tol),
                CheckResult.make(f"{tag}/trace", trace, tol)]
    return out


def suite_relations(cfg: SuiteConfig) -> List[CheckResult]:
    """``U_k U_j = e(theta_jk) U_j U_k`` and unitarity of the generators."""
    th = cfg.theta_or_default
    conv = Convention.PRESENTATION
    tol = cfg.tol("exact")
    one = AlgebraElement.one(th, conv)
    comm = unit = 0.0
    for j in range(th.n):
        Uj = AlgebraElement.generator(th, j + 1, conv)
        unit = max(unit, (Uj * Uj.star() - one).max_abs(), (Uj.star() * Uj - one).max_abs())
        for k in range(j + 1, th.n):
            Uk = AlgebraElement.generator(th, k + 1, conv)
            comm = max(comm, (Uk * Uj - Uj * Uk * complex(np.exp(2j * np.pi * th[j, k]))).max_abs())
    return [CheckResult.make("relations/commutation", comm, tol),
            CheckResult.make("relations/unitarity", unit, tol)]


def _automorphism_checks(tag: str, W, th: SkewMatrix, rng, tol: float) -> List[CheckResult]:
    conv = Convention.PRESENTATION
    act = FiniteCyclicAction(W, th)
    alpha = build_action(act, conv)
    hom = star = tr = 0.0
    for _ in range(100):
        a, b = random_element(th, rng, 3, 2, conv), random_element(th, rng, 3, 2, conv)
        hom = max(hom, (alpha(a * b) - alpha(a) * alpha(b)).max_abs())
        star = max(star, (alpha(a.star()) - alpha(a).star()).max_abs())
        tr = max(tr, abs(alpha(a).trace() - a.trace()))
    a = random_element(th, rng, 4, 2, conv)
    order = (alpha.power(act.order)(a) - a).max_abs()
    return [CheckResult.make(f"{tag}/multiplicative", hom, tol, "100 pairs"),
            CheckResult.make(f"{tag}/star", star, tol),
            CheckResult.make(f"{tag}/trace", tr, tol),
            CheckResult.make(f"{tag}/order{act.order}", order, tol)]


def suite_automorphism(cfg: SuiteConfig) -> List[CheckResult]:
    """Flip on the configured theta; W2, W3, W4, W6 on the bundled 2-d theta."""
    rng = np.random.default_rng(cfg.seed)
    tol = cfg.tol("exact")
    th = cfg.theta_or_default
    out = _automorphism_checks("automorphism/flip", -np.eye(th.n, dtype=np.int64), th, rng, tol)
    th2 = load_theta("theta2d")[0]
    for name in ("W2", "W3", "W4", "W6"):
        out += _automorphism_checks(f"automorphism/{name}", _fixture_matrix(name), th2, rng, tol)
    return out


# ---------------------------------------------------------------------------
# module suites


def _module_ctx(th: SkewMatrix, cfg: SuiteConfig, q: int = None):
    p = (th.n - (q or 0)) // 2 if q is not None else th.n // 2
    if p < 1:
        raise ConfigError("theta must have dimension at least 2")
    return module_context(th, p, q, min_window=cfg.truncations["lwindow"])


def suite_module(cfg: SuiteConfig) -> List[CheckResult]:
    """Right and left actions, their commutation, and the algebraic rules of ``<.,.>_A``."""
    th = cfg.theta_or_default
    ctx = _module_ctx(th, cfg)
    rng = np.random.default_rng(cfg.seed)
    probes = [FunctionState.random(rng, ctx.p, ctx.q, 2) for _ in range(4)]
    cf, win = cfg.tol("closed_form"), cfg.tol("window")
    ls = [rng.integers(-2, 3, size=ctx.n) for _ in range(4)]
    right = left = commute = 0.0
    for f in probes:
        for k in ls:
            for l in ls:
                w = cocycle_value(ctx.theta, ctx.convention, k, l)
                right = max(right, relative_residual(right_act(right_act(f, k, ctx), l, ctx),
                                                     right_act(f, k + l, ctx) * w, f))
                wB = cocycle_value(ctx.theta_B, ctx.convention, k, l)
                left = max(left, relative_residual(left_act(k, left_act(l, f, ctx), ctx),
                                                   left_act(k + l, f, ctx) * wB, f))
                commute = max(commute, relative_residual(left_act(k, right_act(f, l, ctx), ctx),
                                                         right_act(left_act(k, f, ctx), l, ctx), f))
    herm = linear = adj = pos = 0.0
    for f, g in zip(probes[::2], probes[1::2]):
        scale = l2_norm(f) * l2_norm(g)
        fg, gf = inner_A(f, g, ctx), inner_A(g, f, ctx)
        herm = max(herm, (fg.star() - gf).max_abs() / scale)
        a = random_element(ctx.theta, rng, 2, 1, ctx.convention)
        linear = max(linear, (inner_A(f, right_act_element(g, a, ctx), ctx) - fg * a).max_abs() / scale)
        adj = max(adj, (inner_A(right_act_element(f, a, ctx), g, ctx) - a.star() * fg).max_abs() / scale)
        pos = max(pos, abs(inner_A(f, f, ctx).trace() - l2_inner(f, f)) / l2_norm(f) ** 2)
    return [CheckResult.make("module/right-action", right, cf),
            CheckResult.make("module/left-action", left, cf),
            CheckResult.make("module/commute", commute, cf),
            CheckResult.make("module/inner-hermitian", herm, win),
            CheckResult.make("module/inner-right-linear", linear, win),
            CheckResult.make("module/inner-adjoint", adj, win),
            CheckResult.make("module/inner-trace", pos, win)]


def imprimitivity_residual(ctx, f, g, h) -> float:
    lhs = left_act_element(inner_B(f, g, ctx), h, ctx)
    rhs = right_act_element(f, inner_A(g, h, ctx), ctx)
    scale = l2_norm(f) * l2_norm(g) * l2_norm(h)
    return relative_residual(lhs, rhs, h) * l2_norm(h) / scale


def suite_imprimitivity(cfg: SuiteConfig, triples: int = 10) -> List[CheckResult]:
    """``_B<f, g> h = f <g, h>_A`` for ``p = 1`` and ``q = 0, 1``."""
    out = []
    rng = np.random.default_rng(cfg.seed)
    for q, name in ((0, "theta2d"), (1, "theta3d")):
        th = load_theta(name)[0]
        ctx = module_context(th, 1, q, min_window=cfg.truncations["lwindow"])
        worst = 0.0
        for _ in range(triples):
            f, g, h = (FunctionState.random(rng, 1, q, 2) for _ in range(3))
            worst = max(worst, imprimitivity_residual(ctx, f, g, h))
        out.append(CheckResult.make(f"imprimitivity/p=1/q={q}", worst, cfg.tol("imprimitivity"),
                                    f"{triples} random triples"))
    return out


def suite_equivariance(cfg: SuiteConfig) -> List[CheckResult]:
    """Generator replay for ``m = 1, 2`` and the general identity over random theta."""
    cf = cfg.tol("closed_form")
    out = []
    for m in (1, 2):
        out += eqv.proof_replay(m, seed=cfg.seed, tol=cf)
    for case in eqv.general_cases(seed=cfg.seed):
        case.tolerance = cf
        out += eqv.run_case(case)
    if cfg.theta is not None:
        ctx = _module_ctx(cfg.theta, cfg, cfg.theta.n % 2)
        rng = np.random.default_rng(cfg.seed)
        probes = [FunctionState.random(rng, ctx.p, ctx.q, 2) for _ in range(4)]
        out += eqv.run_case(eqv.flip_case(f"given/{cfg.theta_label}/flip", ctx, probes, cf), inner=False)
    return out


def suite_hexic(cfg: SuiteConfig) -> List[CheckResult]:
    """``F^6 = -Id`` for the order-six operator, and ``Id`` after the scalar lift."""
    tol = cfg.tol("order")
    probes = probe_states(1, 10, cfg.seed)
    op = hexic(1)
    rep = operator_order(op, 6, probes, tol=tol, report=True)
    lifted = scalar_lift(op, 6, probes)
    rep_l = operator_order(lifted, 6, probes, tol=tol, report=True)
    gen = hexic_general(cfg.theta12)
    rep_g = operator_order(gen, 6, probes, tol=tol, report=True)
    return [CheckResult.make("hexic/lambda=-1", abs(rep.lam + 1), tol, f"lambda = {rep.lam:.12f}"),
            CheckResult.make("hexic/probe-spread", rep.spread, tol),
            CheckResult.make("hexic/lifted-order6", max(abs(rep_l.lam - 1), rep_l.residual), tol),
            CheckResult.make("hexic/general-order6", max(abs(rep_g.lam - 1), rep_g.residual), tol,
                             f"theta12 = {cfg.theta12:.12f}")]


def suite_flip(cfg: SuiteConfig) -> List[CheckResult]:
    """The flip ``f -> f(-x, -t)`` extends the module to the crossed product, ``|l| <= 3``."""
    th = cfg.theta_or_default
    q = th.n % 2
    p = (th.n - q) // 2
    r = eqv.check_flip_extension(th, p, q, radius=3, seed=cfg.seed, tol=cfg.tol("flip_extension"))
    return [r]


# ---------------------------------------------------------------------------
# projections


def suite_projections(cfg: SuiteConfig) -> List[CheckResult]:
    """``P_1 ... P_8``: idempotent, self-adjoint and of trace 1/2."""
    th = cfg.theta_or_default
    if th.n != 3:
        raise ConfigError("the projections suite needs a 3-d theta")
    tol = cfg.tol("exact")
    out = []
    for i in PROJECTION_TABLE:
        try:
            P = build_projection(i, th, tol=tol)
        except ArithmeticError as exc:
            out.append(CheckResult.make(f"projections/P{i}/relations", float("inf"), tol, str(exc)))
            continue
        out.append(CheckResult.make(f"projections/P{i}/idempotent", P.idempotence_residual, tol))
        out.append(CheckResult.make(f"projections/P{i}/selfadjoint", P.selfadjoint_residual, tol))
        out.append(CheckResult.make(f"projections/P{i}/trace", abs(projection_trace(P) - 0.5), tol))
    return out


def suite_rieffel(cfg: SuiteConfig) -> List[CheckResult]:
    """Rieffel projection at the configured cutoff and the monotone convergence study."""
    t = cfg.theta12
    n = cfg.truncations["fourier_cutoff"]
    r = rieffel_projection(RieffelData(t, n))
    fi = flip_invariant_variant(RieffelData(t, n, symmetric=True))
    rows = convergence_study(t)
    idem = [row["idempotence"] for row in rows]
    mono = max((b - a for a, b in zip(idem, idem[1:])), default=0.0)
    return [CheckResult.make(f"rieffel/cutoff={n}/idempotence", r.idempotence, cfg.tol("rieffel_idempotence")),
            CheckResult.make(f"rieffel/cutoff={n}/selfadjoint", r.selfadjoint, cfg.tol("exact")),
            CheckResult.make(f"rieffel/cutoff={n}/trace", r.trace_error, cfg.tol("rieffel_trace")),
            CheckResult.make(f"rieffel/cutoff={n}/flip-invariance", fi.flip_residual, cfg.tol("flip_invariance")),
            CheckResult.make("rieffel/monotone", max(mono, 0.0), 0.0,
                             "idempotence " + ", ".join(f"{x:.3e}" for x in idem))]


def suite_trace_identity(cfg: SuiteConfig) -> List[CheckResult]:
    """``theta_12 = 2 tau(S_g)`` and the full identity with the traces of ``P_1 ... P_4``."""
    t = cfg.theta12
    n = cfg.truncations["fourier_cutoff"]
    fi = flip_invariant_variant(RieffelData(t, n, symmetric=True))
    th3 = SkewMatrix(np.array([[0, t, 1], [-t, 0, 1], [-1, -1, 0]], dtype=float))
    taus = [projection_trace(build_projection(i, th3)) for i in (1, 2, 3, 4)]
    full = abs(t - (2 * fi.Sg_trace + (taus[0] + taus[1]) - (taus[2] + taus[3])))
    return [CheckResult.make(f"trace-identity/cutoff={n}/2tau(Sg)", abs(t - 2 * fi.Sg_trace),
                             cfg.tol("trace_identity")),
            CheckResult.make(f"trace-identity/cutoff={n}/with-P1-P4", full, cfg.tol("trace_identity")),
            CheckResult.make(f"trace-identity/cutoff={n}/closed-form", sg_trace_identity(t, fi.Sg_trace),
                             cfg.tol("trace_identity"))]


def suite_toeplitz(cfg: SuiteConfig) -> List[CheckResult]:
    """The map ``p``, the truncated generators, the ideal, and the commuting square for ``N = 8, 16, 32``."""
    tol = cfg.tol("exact")
    A = tp.CoefficientAlgebra.flip(cfg.theta12)
    rng = np.random.default_rng(cfg.seed)
    out = tp.check_p_map(A.beta, rng, 100, tol=tol)
    Nmax = cfg.truncations["N"]
    Ns = sorted({n for n in (8, 16, 32) if n <= Nmax} | {Nmax})
    if Ns[0] < 8:
        raise ConfigError("the Toeplitz truncation N must be at least 8")
    out += tp.check_relations(A, Ns[0], rng, tol)
    by_n = {}
    for N in Ns:
        checks, reports = tp.check_diagram(N, A=A, seed=cfg.seed, tol=tol)
        out += checks
        out.append(tp.check_ideal(A, N, tol=tol))
        by_n[N] = reports
    dt, di = tp.defect_norm_drift(by_n)
    out.append(CheckResult.make("toeplitz/truncation-defect-drift", dt, tol, f"N in {Ns}"))
    out.append(CheckResult.make("toeplitz/ideal-defect-drift", di, tol, f"N in {Ns}"))
    checks, _ = tp.check_diagram(8, A=tp.CoefficientAlgebra.scalars(), seed=cfg.seed, tol=tol)
    out += [CheckResult.make("scalar/" + c.id, c.residual, c.tolerance, c.detail) for c in checks]
    return out


SUITES: Dict[str, Callable[[SuiteConfig], List[CheckResult]]] = {
    "cocycle": suite_cocycle,
    "relations": suite_relations,
    "automorphism": suite_automorphism,
    "module": suite_module,
    "imprimitivity": suite_imprimitivity,
    "equivariance": suite_equivariance,
    "hexic": suite_hexic,
    "flip": suite_flip,
    "projections": suite_projections,
    "rieffel": suite_rieffel,
    "trace-identity": suite_trace_identity,
    "toeplitz-diagram": suite_toeplitz,
}


def run_suite(cfg: SuiteConfig) -> Report:
    names = list(SUITES) if cfg.suite == "all" else [cfg.suite]
    report = Report(cfg.suite, meta={"seed": cfg.seed, "theta": cfg.theta_label,
                                     "tolerances": cfg.tolerances, "truncations": cfg.truncations,
                                     "suites": names})
    for name in names:
        try:
            report.extend(SUITES[name](cfg))
        except ArithmeticError as exc:
            report.add(CheckResult.make(f"{name}/error", float("inf"), 0.0, str(exc)))
    return report
