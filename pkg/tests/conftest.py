from __future__ import annotations

import json
from pathlib import Path

import pytest

ORACLES = json.loads((Path(__file__).parent / "oracles.json").read_text())

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def oracles() -> dict:
    return ORACLES


@pytest.fixture(scope="session")
def acceptance_log():
    def log(number: int, title: str, passed: bool, detail: str) -> None:
        _ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d} {title}: {detail}")
        print(_ACCEPTANCE_LINES[-1])

    return log


@pytest.fixture(scope="session")
def cbar1() -> float:
    from zetalab.functionals import estimate_cbar

    return estimate_cbar(1, (500.0, 1000.0)).adopted


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
