"""Shared fixtures for the test suite.

Expensive objects (the twisted L-values of the 21A4 example) are computed
once per session; the library's own caches make repeated requests free.
"""

from __future__ import annotations

import pytest

from falsetate.elliptic import parse_curve
from falsetate.fieldtower import Tower
from falsetate.padicl import congruence_check

ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture(scope="session")
def e21():
    return parse_curve("21A4")


@pytest.fixture(scope="session")
def t52():
    return Tower(5, 2)


@pytest.fixture(scope="session")
def golden_congruence(e21, t52):
    return congruence_check(e21, t52, prec=4)


@pytest.fixture
def record():
    """Record one acceptance line: record(criterion, passed, detail)."""

    def _record(criterion: str, passed: bool, detail: str = "") -> bool:
        ACCEPTANCE.append((criterion, bool(passed), detail))
        return bool(passed)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in ACCEPTANCE:
        status = "PASS" if passed else "FAIL"
        line = f"{status}  {criterion}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
