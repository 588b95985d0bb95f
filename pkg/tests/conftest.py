from __future__ import annotations

import sys
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    acceptance = sys.modules.get("test_acceptance")
    results = getattr(acceptance, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, detail in results:
        terminalreporter.write_line(f"[{status}] {name}: {detail}")


@pytest.fixture
def smallcorpus_dir() -> Path:
    return FIXTURES / "smallcorpus"


@pytest.fixture
def planted_dir() -> Path:
    return FIXTURES / "planted"


@pytest.fixture
def golden_dir() -> Path:
    return FIXTURES / "golden"
