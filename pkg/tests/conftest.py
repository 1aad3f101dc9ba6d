import numpy as np
import pytest
from hypothesis import settings

from nctorus.algebra import SkewMatrix
from nctorus.suites import load_theta

settings.register_profile("nctorus", max_examples=25, deadline=None)
settings.load_profile("nctorus")

GOLDEN = (np.sqrt(5) - 1) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def theta3d() -> SkewMatrix:
    return load_theta("theta3d")[0]


@pytest.fixture(scope="session")
def theta2d() -> SkewMatrix:
    return load_theta("theta2d")[0]


ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(k, passed, detail)``."""

    def record(k: int, passed: bool, detail: str) -> bool:
        line = f"criterion {k:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE[k] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
