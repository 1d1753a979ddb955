from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

_CRITERIA: list[tuple[str, bool, str]] = []


class Criterion:
    def __init__(self, name):
        self.name = name
        self.notes = []

    def note(self, text):
        self.notes.append(str(text))

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        ok = exc_type is None
        detail = "; ".join(self.notes)
        if exc is not None:
            detail = (detail + "; " if detail else "") + f"{exc_type.__name__}: {exc}".splitlines()[0]
        _CRITERIA.append((self.name, ok, detail))
        print(f"[{'PASS' if ok else 'FAIL'}] {self.name} {detail}")
        return False


@pytest.fixture
def criterion():
    return Criterion


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
