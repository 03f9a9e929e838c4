"""Shared pytest hooks: the acceptance suite reports one line per criterion."""

import pytest

ACCEPTANCE_RESULTS: dict[int, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.failed):
        ACCEPTANCE_RESULTS[number] = ("PASS" if report.passed else "FAIL", title)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): an acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        verdict, title = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d} {verdict}: {title}")
