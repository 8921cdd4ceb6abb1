import sys

import pytest

from compnoma.experiments import default_params, link_table_for
from compnoma.geometry import preset_b2, preset_b3


@pytest.fixture
def params():
    return default_params()


@pytest.fixture
def lt_b2():
    return link_table_for(preset_b2(), default_params())


@pytest.fixture
def lt_b3():
    return link_table_for(preset_b3(), default_params())


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
