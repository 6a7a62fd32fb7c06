import pytest

_RESULTS: dict = {}
_DETAILS: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and title")


@pytest.fixture
def detail(request):
    """Attach a one-line measurement to the acceptance summary."""
    def note(msg: str):
        _DETAILS.setdefault(request.node.nodeid, []).append(msg)
    return note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        prev = _RESULTS.get(n, (title, True, 0.0))
        _RESULTS[n] = (title, prev[1] and rep.passed, prev[2] + rep.duration)
        item.config._criterion_nodes = getattr(item.config, "_criterion_nodes", {})
        item.config._criterion_nodes.setdefault(n, []).append(item.nodeid)


def pytest_terminal_summary(terminalreporter, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    nodes = getattr(config, "_criterion_nodes", {})
    for n in sorted(_RESULTS):
        title, ok, secs = _RESULTS[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {n:>2}: {title}  ({secs:.1f} s)")
        for node in nodes.get(n, []):
            for msg in _DETAILS.get(node, []):
                terminalreporter.write_line(f"        {msg}")
