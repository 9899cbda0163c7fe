import numpy as np
import pytest

from hdgibbs.rng import RandomStream


@pytest.fixture
def stream():
    return RandomStream(12345, 0)


@pytest.fixture
def np_rng():
    """Independent oracle generator (not a RandomStream)."""
    return np.random.default_rng(987654321)


_VERDICTS: list[tuple[str, bool, str]] = []


@pytest.fixture
def verdict():
    """Record one acceptance line and fail the test when it did not pass."""

    def record(label: str, passed: bool, detail: str):
        passed = bool(passed)
        _VERDICTS.append((label, passed, detail))
        print(f"{'PASS' if passed else 'FAIL'}  {label}: {detail}")
        assert passed, f"{label}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in _VERDICTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}: {detail}")
