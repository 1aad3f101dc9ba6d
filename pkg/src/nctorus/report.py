"""Check records shared by the verifiers and the command line."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, List


@dataclass(frozen=True)
class CheckResult:
    id: str
    residual: float
    tolerance: float
    passed: bool
    detail: str = ""

    @classmethod
    def make(cls, id: str, residual: float, tolerance: float, detail: str = "") -> "CheckResult":
        residual = float(residual)
        return cls(id, residual, float(tolerance), bool(residual <= tolerance), detail)


@dataclass
class Report:
    suite: str
    checks: List[CheckResult] = field(default_factory=list)
    meta: Dict[str, object] = field(default_factory=dict)

    def add(self, check: CheckResult) -> CheckResult:
        self.checks.append(check)
        return check

    def extend(self, checks: Iterable[CheckResult]):
        self.checks.extend(checks)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def sorted_checks(self) -> List[CheckResult]:
        return sorted(self.checks, key=lambda c: c.id)

    def to_json(self) -> str:
        checks = self.sorted_checks()
        body = {
            "suite": self.suite,
            "meta": self.meta,
            "checks": [asdict(c) for c in checks],
            "summary": {"total": len(checks), "passed": sum(c.passed for c in checks),
                        "failed": sum(not c.passed for c in checks)},
        }
        return json.dumps(body, indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["id", "residual", "tolerance", "passed", "detail"])
        for c in self.sorted_checks():
            w.writerow([c.id, f"{c.residual:.6e}", f"{c.tolerance:.1e}", c.passed, c.detail])
        return buf.getvalue()

    def table(self) -> str:
        checks = self.sorted_checks()
        width = max((len(c.id) for c in checks), default=10)
        lines = [f"{'check'.ljust(width)}  {'residual':>12}  {'tol':>8}  status"]
        for c in checks:
            lines.append(f"{c.id.ljust(width)}  {c.residual:12.3e}  {c.tolerance:8.1e}  {'PASS' if c.passed else 'FAIL'}")
        n_fail = sum(not c.passed for c in checks)
        lines.append(f"{len(checks) - n_fail}/{len(checks)} checks passed")
        return "\n".join(lines)
