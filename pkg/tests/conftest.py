"""Shared test plumbing: the acceptance result reporter.

Acceptance tests record one line per criterion through the
`acceptance_log` fixture; the lines are replayed in the terminal
summary so pass/fail status and measured values stay visible even
when pytest captures stdout.
"""

import pytest

_LINES = []


class AcceptanceLog:
    def record(self, name: str, ok: bool, detail: str) -> None:
        line = f"{name}: {'PASS' if ok else 'FAIL'} {detail}"
        _LINES.append(line)
        print(line)


@pytest.fixture(scope="session")
def acceptance_log():
    return AcceptanceLog()


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _LINES:
        terminalreporter.write_line(line)
