import pytest

from qbm.bath import BathParams


@pytest.fixture
def fig6():
    # Gamma = 10 with gamma tuned so <H_s> = 1 at T = 0
    return BathParams(omega0=1.0, gamma=2.4313330538925562, cutoff=10.0)


@pytest.fixture
def fig1():
    return BathParams(omega0=1.0, gamma=1.9834528864729277, cutoff=100.0)


@pytest.fixture
def fig5():
    return BathParams(omega0=1.0, gamma=0.93, cutoff=100.0)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
