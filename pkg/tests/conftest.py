import math

import numpy as np
import pytest

from scswalk.hellinger_opt import OptimizerConfig, optimize
from scswalk.operators import coherent_state

D = 31
ALPHA = 5 * complex(math.cos(math.pi), math.sin(math.pi))


@pytest.fixture(scope="session")
def psi0():
    return coherent_state(ALPHA, D, 0)


@pytest.fixture(scope="session")
def hadamard_fit(psi0):
    """Default multistart fit to the Hadamard walk; shared because it takes seconds."""
    return optimize(math.pi / 4, D, 50, psi0, OptimizerConfig())


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_report():
    """Print one PASS/FAIL line for a criterion and fail the test if it does not hold."""

    def report(number: int, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
