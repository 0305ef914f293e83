import re

import pytest
from hypothesis import HealthCheck, settings

from solvtower.tower import build_level

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def lvl222():
    return build_level(2, 2, 2)


@pytest.fixture(scope="session")
def lvl223():
    return build_level(2, 2, 3)


@pytest.fixture(scope="session")
def closure2(lvl222):
    from solvtower.automorphism import generate_aut_prime
    return generate_aut_prime(lvl222)


_CRITERIA = {}
_LABEL = re.compile(r"test_criterion_(\d+)_(\w+)")


def pytest_runtest_logreport(report):
    m = _LABEL.search(report.nodeid)
    if not m or "test_acceptance" not in report.nodeid:
        return
    key = (int(m.group(1)), m.group(2).replace("_", " "))
    if report.failed:
        _CRITERIA[key] = "FAIL"
    elif report.skipped:
        _CRITERIA.setdefault(key, "SKIP")
    elif report.when == "call":
        _CRITERIA.setdefault(key, "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for (num, label), status in sorted(_CRITERIA.items()):
        terminalreporter.write_line(f"criterion {num:2d} {label:<40s} {status}")
