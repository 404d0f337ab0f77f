import numpy as np
import pytest

from isingchain.chain import BasisState

_ACCEPTANCE = []


def record(name, passed, detail=""):
    _ACCEPTANCE.append((name, bool(passed), detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def l5_state():
    # |0_4 0_3 0_2 1_1 0_0>, driven spin 2
    return BasisState.from_string("00010")
