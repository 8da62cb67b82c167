"""Shared fixtures for the zerotap test suite."""

import logging
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from zerotap.io import read_json, write_json
from zerotap.series import explicit_coeffs, geometric_partial_sum

logger = logging.getLogger(__name__)

GOLDEN_PATH = Path(__file__).parent / "golden" / "values.json"


def pytest_addoption(parser):
    parser.addoption(
        "--update-golden",
        action="store_true",
        default=False,
        help="Re-record every golden value a test reports instead of comparing",
    )


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(scope="session")
def s200():
    """Partial sum of the geometric series, n = 200."""
    return geometric_partial_sum(200)


@pytest.fixture
def unit_root():
    """z^n - 1 as an explicit member with V = n."""

    def make(n: int):
        return explicit_coeffs([-1] + [0] * (n - 1) + [1], label=f"z^{n}-1")

    return make


@pytest.fixture
def coeffseq_file(tmp_path):
    """Write a CoeffSeq to a JSON file and return its path."""

    def write(f, name: str = "input.json"):
        return write_json(tmp_path / "inputs" / name, f.to_json())

    return write


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def golden(request):
    """Compare named values with tests/golden/values.json.

    A name missing from the file is recorded on its first pass and written
    back when the session ends.
    """
    update = request.config.getoption("--update-golden")
    stored = read_json(GOLDEN_PATH) if GOLDEN_PATH.exists() else {}
    recorded = {}

    def check(name: str, value: float, rel: float = 1e-9) -> None:
        value = float(value)
        if name in stored and not update:
            assert value == pytest.approx(stored[name], rel=rel), f"golden value {name} moved"
        else:
            recorded[name] = value

    yield check
    if recorded:
        write_json(GOLDEN_PATH, {**stored, **recorded})
        logger.warning(f"Recorded golden values {sorted(recorded)} in {GOLDEN_PATH}")
