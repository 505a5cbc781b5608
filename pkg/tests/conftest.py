import pytest

_LINES = []


def record(criterion: str, ok: bool, detail: str = ""):
    line = f"[{'PASS' if ok else 'FAIL'}] {criterion}" + (f"  ({detail})" if detail else "")
    _LINES.append(line)
    print(line)
    return ok


@pytest.fixture
def acceptance():
    return record


@pytest.fixture
def workspace(tmp_path, monkeypatch):
    from rankinpadic.shell import Workspace
    monkeypatch.setenv("RANKINPADIC_WORKSPACE", str(tmp_path / "ws"))
    return Workspace(tmp_path / "ws")


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
