from fractions import Fraction

import pytest

from dyckmining.analytic import EthereumParams

Q_GRID = (Fraction(1, 10), Fraction(1, 5), Fraction(1, 3), Fraction(2, 5), Fraction(9, 20))
GAMMA_GRID = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))


@pytest.fixture
def eth():
    return EthereumParams()


# one PASS/FAIL line per acceptance criterion, shown at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
