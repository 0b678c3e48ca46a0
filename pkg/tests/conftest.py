"""Collects acceptance verdicts and prints them after the test summary."""

VERDICTS: list[str] = []


def record(criterion: str, passed: bool, detail: str) -> str:
    line = f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}"
    VERDICTS.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
