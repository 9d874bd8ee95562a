import os

import pytest
from hypothesis import HealthCheck, settings

from twisted_strata import A0, AmbientSpace, TwistedGraph

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def loop(r):
    return TwistedGraph.build([(0, A0.one)], {"1": 0}, [(0, 0, r)], leg_twists={"1": 1})


@pytest.fixture
def m11():
    """Genus 1, one marking of twist 1, total value 1."""
    return AmbientSpace(1, (("1", 1),), A0.one)


@pytest.fixture
def m04():
    return AmbientSpace(0, tuple((str(i), 1) for i in range(1, 5)), A0.zero)


_ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
