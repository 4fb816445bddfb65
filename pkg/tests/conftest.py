import numpy as np
import pytest

from ternarybell.qcore import canonical_behavior

QUANTUM_MAX = 2.0 * (2.0 / 3.0) ** 1.5


@pytest.fixture(scope="session")
def quantum():
    return canonical_behavior()


def signaling_table() -> np.ndarray:
    """Alice's P(a=0|x=0) is 1 for y=0 and 0 for y=1; every other slice uniform."""
    p = np.full((2, 2, 3, 3), 1.0 / 9.0)
    p[0, 0] = 0.0
    p[0, 0, 0, :] = 1.0 / 3.0
    p[0, 1] = 0.0
    p[0, 1, 1, :] = 1.0 / 3.0
    return p


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
