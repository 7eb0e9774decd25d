from __future__ import annotations

import os

import pytest
from hypothesis import HealthCheck, settings

from flatcp.exactnum import KNum, parse_knum
from flatcp.flatsurf import PrototypeParams, buildSurface, prototypeP112

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", deadline=None, max_examples=400)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# (criterion number, title) -> "PASS" / "FAIL", filled by tests/test_acceptance.py
ACCEPTANCE: dict[tuple[int, str], str] = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for (num, title), verdict in sorted(ACCEPTANCE.items()):
        terminalreporter.write_line(f"{verdict} criterion {num:>2}: {title}")


SQRT17 = parse_knum("sqrt(17)")


@pytest.fixture(scope="session")
def prototype():
    """The (w, h, e) = (2, 1, -1) prototype at t = lambda / 3."""
    lam = (SQRT17 - 1) / 2
    params = PrototypeParams(2, 1, -1, lam / 3)
    S, prym, T = prototypeP112(params)
    return params, S, prym, T


@pytest.fixture(scope="session")
def torus():
    one, zero = KNum(1), KNum(0)
    square = [(zero, zero), (one, zero), (one, one), (zero, one)]
    return buildSurface([square], [((0, 0), (0, 2), 1), ((0, 1), (0, 3), 1)])
