import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from oracles import RP1, RP2  # noqa: E402

from latticewave.riemann import RiemannConfig, decompose, run_riemann  # noqa: E402


def _riemann(data, N=4000):
    cfg = RiemannConfig(**data, N=N, t_fin_bar=0.4)
    traj, fields = run_riemann(cfg)
    return cfg, traj, fields, decompose(fields)


@pytest.fixture(scope="session")
def rp1_run():
    return _riemann(RP1)


@pytest.fixture(scope="session")
def rp2_run():
    return _riemann(RP2)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
