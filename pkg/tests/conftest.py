import os

import pytest
from hypothesis import HealthCheck, settings

from dunkl_sobolev.classical import ClassicalMeasure
from dunkl_sobolev.coherence import build_pair
from dunkl_sobolev.config import PRESETS

settings.register_profile("default", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("quick", max_examples=20, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def hermite():
    return ClassicalMeasure("hermite", 5.0)


@pytest.fixture(scope="session")
def gegenbauer():
    return ClassicalMeasure("gegenbauer", 1.0, 5.0)


@pytest.fixture(scope="session")
def hermite_cfg():
    return PRESETS["hermite"]


@pytest.fixture(scope="session")
def gegenbauer_cfg():
    return PRESETS["gegenbauer"]


@pytest.fixture(scope="session")
def hermite_pair(hermite):
    return build_pair(hermite, 1.2, 1.3, 22)


@pytest.fixture(scope="session")
def gegenbauer_pair(gegenbauer):
    return build_pair(gegenbauer, 0.1, 0.15, 22)


def pytest_configure(config):
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""
    def record(number: int, ok: bool, detail: str):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        request.config.acceptance_lines.append(line)
        print(line)
        assert ok, line
    return record
