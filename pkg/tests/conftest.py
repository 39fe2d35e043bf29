"""Shared fixtures: bundled teams and small deterministic helpers."""
import sys

import numpy as np
import pytest

from doublesim.engine import GameOptions
from doublesim.teams import builtin_holdout_teams, builtin_train_teams


@pytest.fixture(scope="session")
def train_teams():
    return builtin_train_teams()


@pytest.fixture(scope="session")
def holdout_teams():
    return builtin_holdout_teams()


@pytest.fixture(scope="session")
def one_team(train_teams):
    return train_teams[0]


@pytest.fixture
def fast_options():
    return GameOptions(skip_team_preview=True)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, printed after the run."""
    mod = sys.modules.get("test_acceptance")
    if mod is not None and getattr(mod, "RESULTS", None):
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
