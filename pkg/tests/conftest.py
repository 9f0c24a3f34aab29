"""Shared pytest wiring.

Tests marked ``acceptance(criterion=N)`` feed a per-criterion verdict table
that is printed after the run, one line each, so the gate can be read off
the terminal without digging through the report.
"""

import pytest

ACCEPTANCE_RESULTS: pytest.StashKey = pytest.StashKey()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    criterion = marker.kwargs.get("criterion")
    if criterion is None:
        return
    results = item.config.stash.setdefault(ACCEPTANCE_RESULTS, {})
    if report.failed or (report.skipped and report.when == "setup"):
        results[criterion] = False
    elif report.when == "call" and report.passed:
        results.setdefault(criterion, True)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(ACCEPTANCE_RESULTS, None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(results):
        verdict = "PASS" if results[criterion] else "FAIL"
        terminalreporter.write_line(f"[ACCEPTANCE] criterion {criterion}: {verdict}")
