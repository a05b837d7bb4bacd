import pytest

_ACCEPTANCE_LINES = []


class _Criterion:
    def __init__(self, label):
        self.label = label
        self.details = []

    def note(self, text):
        self.details.append(str(text))


@pytest.fixture
def criterion(request):
    """Record a PASS/FAIL line for one acceptance criterion."""
    marker = request.node.get_closest_marker("criterion")
    crit = _Criterion(marker.args[0] if marker else request.node.name)
    yield crit
    rep = getattr(request.node, "rep_call", None)
    passed = rep is not None and rep.passed
    detail = "; ".join(crit.details)
    line = f"{'PASS' if passed else 'FAIL'}  {crit.label}" + (f"  ({detail})" if detail else "")
    _ACCEPTANCE_LINES.append(line)
    print("\n" + line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion label")


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
