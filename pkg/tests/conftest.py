import math

import numpy as np
import pytest
from hypothesis import settings

from vlc_secrecy.channel import default_sigma

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@pytest.fixture
def sigma():
    return default_sigma()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def rel_close(a, b, rtol):
    return math.isclose(a, b, rel_tol=rtol, abs_tol=0.0)


# one line per acceptance criterion, printed after the run whatever the capture mode
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance(request):
    def report(ok: bool, detail: str):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'} {request.node.name}: {detail}")
        assert ok, detail
    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
