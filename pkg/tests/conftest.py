import os
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parents[1]
LANDSAT_DIR = Path(os.environ.get("ADAPTIVE_SGLD_DATA", ROOT / "data" / "landsat"))


def landsat_available():
    return (LANDSAT_DIR / "sat.trn").is_file() and (LANDSAT_DIR / "sat.tst").is_file()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def landsat_paths():
    if not landsat_available():
        pytest.skip("Landsat files not present; run scripts/materialize_landsat.py or set ADAPTIVE_SGLD_DATA")
    return LANDSAT_DIR / "sat.trn", LANDSAT_DIR / "sat.tst"


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_report():
    """Record one pass/fail line for a criterion, then assert it."""

    def report(criterion, ok, detail):
        line = f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
