"""Regenerate docs/rieffel_convergence.md from the Rieffel convergence study."""
from pathlib import Path

import numpy as np

from nctorus.projections import RieffelData, convergence_study

GOLDEN = (np.sqrt(5) - 1) / 2
CUTOFFS = (8, 16, 32, 64, 128)


def main():
    rows = convergence_study(GOLDEN, CUTOFFS)
    eps = RieffelData(GOLDEN, 1).eps
    lines = [
        "# Rieffel projection convergence study",
        "",
        f"theta12 = {GOLDEN:.16f}, bump width eps = {eps:.6f}, sampling grid 2^14 points.",
        "Residuals are l^1 norms of Fourier coefficients, which dominate the C*-norm.",
        "",
        "| cutoff | norm(p^2 - p) | abs(tau(p) - theta12) | norm(alpha(p) - p), rotated p | trace identity |",
        "|---:|---:|---:|---:|---:|",
    ]
    for r in rows:
        lines.append(f"| {r['cutoff']} | {r['idempotence']:.3e} | {r['trace_error']:.1e} | "
                     f"{r['flip_residual']:.1e} | {r['Sg_trace_identity']:.1e} |")
    lines += [
        "",
        "The idempotence residual decreases strictly with the cutoff, which fixes the",
        "thresholds used by the `rieffel` suite: 1e-3 at cutoff 64 leaves roughly three",
        "orders of magnitude of headroom.  The trace error is zero to rounding because the",
        "constant Fourier mode of `f` is computed from the same samples at every cutoff.",
        "",
        "Regenerate with `python scripts/convergence_study.py`.",
        "",
    ]
    out = Path(__file__).resolve().parent.parent / "docs" / "rieffel_convergence.md"
    out.write_text("\n".join(lines))
    print("\n".join(lines))


if __name__ == "__main__":
    main()
