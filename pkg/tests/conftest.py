import pytest

from gpmemory.kernels import ConstantKernel, ExponentialKernel
from gpmemory.signals import mollify_delta
from gpmemory.timedomain import Grid, solve


@pytest.fixture(scope="session")
def bump():
    return mollify_delta(0.05, "bump")


@pytest.fixture(scope="session")
def telegraph_field(bump):
    # reference resolution dx = 0.005, dt = 0.00125
    return solve(ExponentialKernel(1.0, 1.0), bump, Grid(3.0, 600, 2.5, 2000))


@pytest.fixture(scope="session")
def telegraph_long_field(bump):
    # long enough for the plateau window at x = 2
    return solve(ExponentialKernel(1.0, 1.0), bump, Grid(3.6, 720, 3.0, 2400))


@pytest.fixture(scope="session")
def wave_field(bump):
    return solve(ConstantKernel(2.0), bump, Grid(6.0, 1200, 2.5, 2000))


#: lines recorded by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
