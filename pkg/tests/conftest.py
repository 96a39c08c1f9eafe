import pytest

from entsub.sampling import RngStream

_ACCEPTANCE_LINES = []


@pytest.fixture
def report_criterion():
    def _record(number, name, passed, detail=""):
        status = "PASS" if passed else "FAIL"
        _ACCEPTANCE_LINES.append(f"[{status}] criterion {number}: {name} -- {detail}")
    return _record


@pytest.fixture
def rng():
    return RngStream(12345, 0)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
