import contextlib

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


def pytest_configure(config):
    config._acceptance = {}


@pytest.fixture
def criterion(request):
    """Context manager recording one PASS/FAIL line per acceptance criterion."""
    lines = request.config._acceptance

    @contextlib.contextmanager
    def run(number, title):
        info = {}
        try:
            yield info
        except BaseException:
            lines[number] = ("FAIL", title, info)
            raise
        lines[number] = ("PASS", title, info)

    return run


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "_acceptance", {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(lines):
        status, title, info = lines[number]
        detail = ", ".join(f"{k}={v}" for k, v in info.items())
        terminalreporter.write_line(f"criterion {number}: {status}  {title}  [{detail}]")
