"""Shared fixtures: the acceptance summary block.

The acceptance tests each produce one ``[PASS]``/``[FAIL]`` line with
their measured numbers.  Collecting the lines here and replaying them in
the terminal summary keeps them visible in a default (captured) pytest
run; the tests also print immediately for ``-s`` / standalone use.
"""

from __future__ import annotations

import sys

import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_report():
    def _report(name: str, ok: bool, detail: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        print(line, file=sys.__stdout__, flush=True)
        _ACCEPTANCE_LINES.append(line)

    return _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance summary")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
