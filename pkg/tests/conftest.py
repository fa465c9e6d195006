import random

import pytest
from hypothesis import HealthCheck, settings

from btk.field import make_field

settings.register_profile(
    "btk",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("btk")

FIELD_PARAMS = [("QP", 2), ("QP", 3), ("QP", 5), ("LAURENT", 2), ("LAURENT", 3)]


@pytest.fixture(params=FIELD_PARAMS, ids=lambda bp: f"{bp[0]}-{bp[1]}")
def F(request):
    backend, p = request.param
    return make_field(backend, p)


@pytest.fixture
def rng():
    return random.Random(20261016)


# Acceptance lines are collected here and echoed in the terminal summary, so
# they show up even when pytest captures stdout.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
