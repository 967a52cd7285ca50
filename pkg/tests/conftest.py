import pytest

_LINES: dict[int, str] = {}


class AcceptanceLog:
    def record(self, number: int, ok: bool, detail: str):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        _LINES[number] = line
        print(line)


@pytest.fixture
def acceptance():
    return AcceptanceLog()


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_LINES):
        terminalreporter.write_line(_LINES[k])
