import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_VERDICTS = []


def record_verdict(line: str) -> None:
    """Keep an acceptance line for the end-of-run summary and echo it now."""
    _VERDICTS.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_VERDICTS, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
