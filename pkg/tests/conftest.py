import re

import pytest

_CRITERION = re.compile(r"test_criterion_(\d+)")


def pytest_configure(config):
    config._criteria_results = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = _CRITERION.search(item.name)
    if not m:
        return
    results = item.config._criteria_results
    key = int(m.group(1))
    title = (item.function.__doc__ or "").strip().splitlines()[0] if item.function.__doc__ else item.name
    prev = results.get(key, ("PASS", title))
    failed = rep.failed or (rep.when == "call" and rep.skipped)
    if failed:
        results[key] = ("FAIL", title)
    elif key not in results:
        results[key] = prev


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_criteria_results", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results):
        status, title = results[key]
        terminalreporter.write_line(f"{status} criterion {key:2d}: {title}")
