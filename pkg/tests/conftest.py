import numpy as np
import pytest

from sinfreq.runner import ScenarioConfig, run
from sinfreq.signal_gen import SignalSpec


@pytest.fixture
def reference_spec():
    return SignalSpec.linear_chirp(2.0, 1.0, 1.0, 0.05)


@pytest.fixture(scope="session")
def reference_run():
    return run(ScenarioConfig())


def grid(horizon, dt):
    return np.arange(int(round(horizon / dt)) + 1) * dt


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
