import os
import sys
import time

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): an acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_call(item):
    mark = item.get_closest_marker("criterion")
    t0 = time.perf_counter()
    outcome = yield
    if mark is not None:
        number, title = mark.args
        ok = outcome.excinfo is None
        _RESULTS[number] = (title, ok, time.perf_counter() - t0)
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'} ({time.perf_counter() - t0:6.1f} s) {title}"
        print(line)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, ok, wall = _RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if ok else 'FAIL'} ({wall:6.1f} s) {title}")
