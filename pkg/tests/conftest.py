import cmath
import math

import pytest

from holodyn.maps import PolynomialMap, RationalMap

MATING_C = (1 + cmath.sqrt(-3)) / 2


@pytest.fixture
def mating():
    return RationalMap(PolynomialMap((MATING_C, 0, 1)), PolynomialMap((-1, 0, 1)))


@pytest.fixture
def intertwined():
    return PolynomialMap((1j * math.sqrt(7) / 4, -0.75, 0, 1))


def pytest_terminal_summary(terminalreporter):
    from tests.test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS, key=lambda k: (int(k.rstrip("ab")), k)):
        terminalreporter.write_line(RESULTS[key])
