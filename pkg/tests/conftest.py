import pytest

from dressedmodes import load_device, solve_normal_modes

_CRITERIA = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label, text): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        status = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        detail = getattr(item, "criterion_detail", "")
        _CRITERIA.append((marker.args[0], status, marker.args[1], detail))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label, status, text, detail in sorted(_CRITERIA, key=lambda r: (int(r[0].rstrip("AB")), r[0])):
        line = f"criterion {label:>3}: {status}  {text}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def device_a():
    return load_device("A")


@pytest.fixture(scope="session")
def device_b():
    return load_device("B")


@pytest.fixture(scope="session")
def basis_a(device_a):
    return solve_normal_modes(device_a)


@pytest.fixture(scope="session")
def basis_b(device_b):
    return solve_normal_modes(device_b)


@pytest.fixture
def detail(request):
    """Attach a short measured-value note to the acceptance summary line."""

    def _set(text):
        request.node.criterion_detail = text

    return _set
