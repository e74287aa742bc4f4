import time

import pytest
from hypothesis import settings

settings.register_profile("pantslab", deadline=None, max_examples=60)
settings.load_profile("pantslab")

_ACCEPTANCE: dict[str, tuple[str, float, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_call(item):
    start = time.perf_counter()
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        n, title = marker.args
        ok = outcome.excinfo is None
        _ACCEPTANCE[n] = ("PASS" if ok else "FAIL", time.perf_counter() - start, title)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        status, secs, title = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {status}  ({secs:.2f} s)  {title}")
