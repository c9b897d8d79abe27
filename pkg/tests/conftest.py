"""Shared test wiring: the acceptance summary table.

Tests marked `acceptance(num, title)` get one PASS/FAIL line each in the
terminal summary, so the gate's verdict is readable at a glance.
"""

import pytest

_RESULTS = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    num, title = marker.args
    if report.when == "call":
        _RESULTS[num] = (title, report.passed)
    elif report.when == "setup" and report.failed:
        _RESULTS[num] = (title, False)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_RESULTS):
        title, passed = _RESULTS[num]
        terminalreporter.write_line(
            "criterion %d: %s  %s" % (num, "PASS" if passed else "FAIL",
                                      title))
