import numpy as np
import pytest

from tailored_rae.circuit import CNOT, RX, RY, RZ, Circuit, H, X, Y, Z


def random_circuit(rng: np.random.Generator, n: int, depth: int) -> Circuit:
    """Random gate list over the full gate set, one cycle per gate."""
    gates = []
    for _ in range(depth):
        if n > 1 and rng.random() < 0.35:
            c, t = rng.choice(n, size=2, replace=False)
            gates.append(CNOT(int(c), int(t)))
        else:
            q = int(rng.integers(n))
            kind = rng.integers(7)
            theta = float(rng.uniform(-np.pi, np.pi))
            gates.append([X(q), Y(q), Z(q), H(q), RX(theta, q), RY(theta, q), RZ(theta, q)][kind])
    return Circuit.from_gates(n, gates)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
