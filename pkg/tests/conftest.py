import sys

import pytest

from fermi_ellipse.boundary import BoundaryModel


@pytest.fixture(scope="session")
def fig1():
    """The table a = 5 + sin(2 pi t), b = 2 - cos(2 pi t) with delta = 0.05."""
    return BoundaryModel.figure1(0.05)


@pytest.fixture(scope="session")
def fig1_flat():
    return BoundaryModel.figure1(0.0)


@pytest.fixture(scope="session")
def static():
    return BoundaryModel.constant(2.0, 1.0)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    report = getattr(module, "REPORT", None)
    if report:
        terminalreporter.section("acceptance criteria")
        for number in sorted(report):
            terminalreporter.write_line(report[number])
