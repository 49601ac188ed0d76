import math

import pytest
from hypothesis import settings

from locdisc.qubit import make_pair

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def fig1_pair():
    return make_pair(0.8, 0.8, math.pi / 2)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
