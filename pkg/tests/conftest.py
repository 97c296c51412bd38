import numpy as np
import pytest

from darwinsim.branchstate import DEFAULT_PRESET, build_state

ACCEPTANCE_LINES = []


@pytest.fixture
def preset():
    return DEFAULT_PRESET


@pytest.fixture
def plateau_state():
    return build_state(DEFAULT_PRESET)


@pytest.fixture
def angles():
    """(alpha, beta, gamma, delta) at theta1 = theta2 = pi/6."""
    return DEFAULT_PRESET.angle_products()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def criterion():
    """Record named checks; prints and stores one PASS/FAIL line, then asserts them all."""

    class Recorder:
        def __init__(self):
            self.checks = []

        def check(self, label, ok, value=None):
            self.checks.append((label, bool(ok), value))

        def finish(self, name):
            failed = [c for c in self.checks if not c[1]]
            detail = "; ".join(f"{lab}{'' if v is None else f' = {v:.6g}'}{'' if ok else ' [FAILED]'}"
                               for lab, ok, v in self.checks)
            line = f"{'PASS' if not failed else 'FAIL'} {name}: {detail}"
            print(line)
            ACCEPTANCE_LINES.append(line)
            assert not failed, line

    return Recorder()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
