from __future__ import annotations

import pytest

_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): an acceptance criterion")
    config.stash[_KEY] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        item.config.stash[_KEY].append((n, title, "PASS" if rep.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter, config):
    rows = sorted(config.stash[_KEY])
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for n, title, verdict in rows:
        terminalreporter.line(f"criterion {n:>2}: {verdict}  {title}")
