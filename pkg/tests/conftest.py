import pytest

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.fixture
def report(request):
    """Attach a one-line measurement to the criterion being run."""
    def note(text):
        request.node.user_properties.append(("detail", text))
    return note


def pytest_runtest_logreport(report):
    marker = getattr(report, "_criterion", None)
    if marker is None:
        return
    number, title = marker
    entry = _CRITERIA.setdefault(number, {"title": title, "outcome": "PASS", "detail": []})
    if report.skipped:
        entry["outcome"] = "SKIP"
        reason = report.longrepr[-1] if isinstance(report.longrepr, tuple) else str(report.longrepr)
        entry["detail"].append(reason.removeprefix("Skipped: "))
    elif report.failed:
        entry["outcome"] = "FAIL"
    if report.when == "call":
        entry["detail"].extend(v for k, v in report.user_properties if k == "detail")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result()._criterion = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        detail = "; ".join(entry["detail"])
        line = f"[{entry['outcome']}] {number}. {entry['title']}"
        terminalreporter.write_line(line + (f" -- {detail}" if detail else ""))
