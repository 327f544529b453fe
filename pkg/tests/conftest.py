"""Shared fixtures plus the acceptance-summary printer.

The acceptance tests register a one-line verdict per criterion; the
pytest_terminal_summary hook prints them after the run so the lines survive
output capture.
"""

import numpy as np
import pytest

from hardylab.grid import GridSpec

ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, name: str, ok: bool, detail: str = "") -> None:
    verdict = "PASS" if ok else "FAIL"
    line = f"criterion {number:2d} [{name}]: {verdict}"
    if detail:
        line += f"  ({detail})"
    ACCEPTANCE_LINES[number] = line


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])


@pytest.fixture
def spec1d() -> GridSpec:
    return GridSpec(dim=1, halfwidth=8.0, points_per_axis=257)


@pytest.fixture
def spec2d() -> GridSpec:
    return GridSpec(dim=2, halfwidth=4.0, points_per_axis=65)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
