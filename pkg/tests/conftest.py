import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

# criterion number -> (label, all phases passed so far)
_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, label): acceptance criterion checked by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = tuple(marker.args)


def pytest_runtest_logreport(report):
    tag = getattr(report, "criterion", None)
    if tag is None:
        return
    number, label = tag
    ok = not report.failed and not (report.when == "call" and report.skipped)
    prev_ok = _CRITERIA.get(number, (label, True))[1]
    _CRITERIA[number] = (label, prev_ok and ok)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        label, ok = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {label}")
