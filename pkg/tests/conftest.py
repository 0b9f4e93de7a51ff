import time

import numpy as np
import pytest

CRITERIA_LINES: list[str] = []
SESSION_LIMIT_SECONDS = 120.0
_session_start = time.perf_counter()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_sessionstart(session):
    global _session_start
    _session_start = time.perf_counter()


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA_LINES:
            terminalreporter.write_line(line)
        secs = time.perf_counter() - _session_start
        ok = secs < SESSION_LIMIT_SECONDS
        terminalreporter.write_line(
            f"{'PASS' if ok else 'FAIL'} whole pytest session wall time {secs:.1f}s "
            f"(limit {SESSION_LIMIT_SECONDS:.0f}s)")
