import numpy as np
import pytest

ACCEPTANCE_RESULTS = []


@pytest.fixture
def rng():
    return np.random.default_rng(20070605)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {number}. {title}: {detail}")
