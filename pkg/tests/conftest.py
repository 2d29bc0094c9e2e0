import numpy as np
import pytest

from trainmec.scenario import SystemConfig, UserInstance, generate_scenario, make_scenario

# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def make_user(i=0, d=2e6, c=400.0, f_max=0.4e9, e=1.2, p_tx=10 ** 0.5 * 1e-3, pos=(30.0, 0.0)):
    return UserInstance(id=i, position=pos, d_m=d, c_m=c, f_max=f_max, e_budget=e, p_tx=p_tx)


def fixture_scenario(users, S, fading_user=None, fading_bs=None, **cfg):
    config = SystemConfig(num_users=len(users), num_subchannels=S, **cfg)
    M = len(users)
    fu = np.full((M, S), 1 / 3) if fading_user is None else fading_user
    fb = np.full(S, 1 / 3) if fading_bs is None else fading_bs
    return make_scenario(config, users, fu, fb)


@pytest.fixture
def default_scenario():
    return generate_scenario(SystemConfig(), 7)


@pytest.fixture
def small_scenario():
    return generate_scenario(SystemConfig(num_users=6, num_subchannels=4, e_mr_budget=1000.0), 3)
