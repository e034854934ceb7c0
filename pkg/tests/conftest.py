"""Shared pytest hooks: print one PASS/FAIL line per acceptance criterion."""

from __future__ import annotations

ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def record(criterion: str, passed: bool, detail: str) -> bool:
    """Store the verdict for ``criterion`` and return it."""
    ACCEPTANCE[criterion] = (bool(passed), detail)
    return bool(passed)


def _key(name: str):
    head = name.split(" ", 1)[0]
    return (0, int(head)) if head.isdigit() else (1, name)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=_key):
        passed, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
    n_pass = sum(p for p, _ in ACCEPTANCE.values())
    terminalreporter.write_line(f"{n_pass}/{len(ACCEPTANCE)} criteria pass")
