import math

import pytest

from kpbloch.potential import new_potential

ACCEPTANCE_LINES = []


@pytest.fixture
def example():
    return new_potential(-math.pi**2, 0.5)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
