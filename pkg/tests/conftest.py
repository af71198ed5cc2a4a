import pytest

_results: dict[str, tuple[str, float, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name, budget): acceptance criterion with a runtime budget in seconds")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    name, budget = mark.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        _results[name] = (status, rep.duration, budget)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for name, (status, secs, budget) in _results.items():
        terminalreporter.write_line(f"{status}  {name}  ({secs:.2f} s, budget {budget} s)")
