import sys

import pytest

from jetvariant.jet import JetContext


@pytest.fixture
def curves():
    return JetContext.build(["x"], ["y"], {"y{k}": "y"})


@pytest.fixture
def plane():
    return JetContext.build(["x", "y"], ["u"], {"u_{names}": "u"})


@pytest.fixture
def gas():
    return JetContext.build(["x", "y"], ["w"], {"w_{k}": {"dependent": "w", "direction": "y"}, "w_{names}": "w"})


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.LINES:
        terminalreporter.section("acceptance criteria")
        for line in mod.LINES:
            terminalreporter.write_line(line)
