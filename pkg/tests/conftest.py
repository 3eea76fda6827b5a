import numpy as np
import pytest

from gbshash import HashConfig, sample_circuit

ACCEPTANCE_LINES = []


def record(criterion, passed, detail):
    """Queue a one-line verdict for the end-of-run summary."""
    line = f"criterion {criterion:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def circuit4():
    return sample_circuit(4, 4, "brickwork", "periodic", 42)


@pytest.fixture(scope="session")
def config8():
    return HashConfig(sample_circuit(8, 8, "brickwork", "periodic", 42), k=1)
