import pytest

_ACCEPTANCE_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")
    config.stash[_ACCEPTANCE_KEY] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    results = item.config.stash[_ACCEPTANCE_KEY]
    if report.when == "call" or (report.when == "setup" and not report.passed):
        detail = dict(report.user_properties).get("detail", "")
        results[number] = (title, report.passed, detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash[_ACCEPTANCE_KEY]
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, passed, detail = results[number]
        status = "PASS" if passed else "FAIL"
        line = f"criterion {number:2d}: {status}  {title}"
        terminalreporter.write_line(f"{line}  [{detail}]" if detail else line)
    n_pass = sum(passed for _, passed, _ in results.values())
    terminalreporter.write_line(f"{n_pass}/{len(results)} acceptance criteria passed")
