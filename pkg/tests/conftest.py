"""Shared test plumbing: the acceptance suite registers one line per
criterion here, and the terminal summary prints them regardless of
capture settings."""

from __future__ import annotations

from contextlib import contextmanager

import pytest

_ACCEPTANCE_LINES: list[str] = []


@contextmanager
def criterion(number: int, name: str):
    try:
        yield
    except BaseException as exc:
        _ACCEPTANCE_LINES.append(f"ACCEPTANCE {number:2d} {name}: FAIL ({exc})")
        raise
    _ACCEPTANCE_LINES.append(f"ACCEPTANCE {number:2d} {name}: PASS")


@pytest.fixture
def acceptance():
    return criterion


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
