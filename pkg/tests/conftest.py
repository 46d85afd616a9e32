import pytest

# lines recorded by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES: dict[str, str] = {}


@pytest.fixture
def report_line():
    def record(key: str, line: str) -> None:
        ACCEPTANCE_LINES[key] = line
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: (k[0] != "C", int(k[1:]) if k[1:].isdigit() else 0, k)):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
