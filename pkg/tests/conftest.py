import functools

import pytest

from robustgp import PerturbationSet, robust_solve
from robustgp.models import build_wing

ACCEPTANCE_LINES: list[str] = []


@functools.lru_cache(maxsize=None)
def wing():
    return build_wing()[0]


@functools.lru_cache(maxsize=None)
def wing_result(method: str, kind: str, gamma: float, r=None):
    return robust_solve(wing(), method, PerturbationSet(kind, gamma), r=r)


@pytest.fixture(scope="session")
def wing_gp():
    return wing()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
