"""Per-criterion PASS/FAIL checklist printed after the run."""

import pytest

_results: dict[str, bool] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(name): acceptance criterion exercised by this test"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    name = marker.args[0]
    if report.when == "call":
        _results[name] = _results.get(name, True) and report.passed
    elif report.failed:
        _results[name] = False


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for name, ok in _results.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {name}")
