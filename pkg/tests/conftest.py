import numpy as np
import pytest

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def record():
    """Store one acceptance verdict; the summary hook prints them in order."""

    def _record(criterion: int, ok: bool, detail: str):
        ACCEPTANCE[criterion] = (bool(ok), detail)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
