"""Noncommutative tori, Heisenberg modules and metaplectic symmetries, checked numerically."""
from .algebra import (AlgebraElement, Automorphism, Convention, FiniteCyclicAction, OrbifoldElement, SkewMatrix,
                      build_action, cocycle_value)
from .gaussian import FunctionState
from .metaplectic import MetaplecticOp, hexic, operator_order, scalar_lift
from .module import ModuleContext, inner_A, inner_B, module_context
from .report import CheckResult, Report
from .suites import SuiteConfig, run_suite

__all__ = [
    "AlgebraElement", "Automorphism", "Convention", "FiniteCyclicAction", "OrbifoldElement", "SkewMatrix",
    "build_action", "cocycle_value", "FunctionState", "MetaplecticOp", "hexic", "operator_order", "scalar_lift",
    "ModuleContext", "inner_A", "inner_B", "module_context", "CheckResult", "Report", "SuiteConfig", "run_suite",
]
