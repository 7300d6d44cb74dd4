import pytest
from hypothesis import HealthCheck, settings

from fqhb.gf import get_field

settings.register_profile("fqhb", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("fqhb")

_CRITERIA: dict[int, tuple[str, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n = marker.args[0]
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        # work done in shared fixtures is reported by the test itself
        extra = sum(v for k, v in rep.user_properties if k == "setup_seconds")
        _CRITERIA[n] = (status, rep.duration + extra)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        status, dur = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status}  ({dur:.2f} s)")


@pytest.fixture(scope="session")
def F2():
    return get_field(2)


@pytest.fixture(scope="session")
def F3():
    return get_field(3)


@pytest.fixture(scope="session")
def F4():
    return get_field(2, 2)


@pytest.fixture(scope="session")
def F5():
    return get_field(5)
