import pytest

from gsforge.euler import DimensionalParams
from gsforge.hodograph import Geometry
from gsforge.profiles import euler_profiles


@pytest.fixture(scope="session")
def geometry():
    return Geometry(euler_profiles(12))


@pytest.fixture(scope="session")
def params():
    return DimensionalParams(1.0, 1.0)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
