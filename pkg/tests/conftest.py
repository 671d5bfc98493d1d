import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from jetgeodesic.hill import hill_intervals
from jetgeodesic.instances import suite
from jetgeodesic.poly import Polynomial

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []


@pytest.fixture
def harmonic():
    f = Polynomial((0.0, 1.0))
    return f, hill_intervals(f)[0]


@pytest.fixture(scope="session")
def small_suite():
    return suite(seed=101, count=24)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
