import math

import mpmath
import pytest
from hypothesis import settings

from zetaforge.orbits import MappingTorusModel

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

mpmath.mp.dps = 30

LAMBDA = (3 + math.sqrt(5)) / 2


@pytest.fixture(scope="session")
def cat():
    return MappingTorusModel((2, 1, 1, 1), 1.0)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[key])
