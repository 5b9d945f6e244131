"""Pytest configuration and fixtures."""

from pathlib import Path

import pytest

from src.core.model_parser import load_model, parse_model
from tests.snapshot_helper import SnapshotAssertion

REPO_ROOT = Path(__file__).parent.parent
FIXTURES_DIR = Path(__file__).parent / "fixtures"


def pytest_addoption(parser):
    """Add pytest command line options."""
    parser.addoption(
        "--update-snapshots",
        action="store_true",
        default=False,
        help="Update snapshot files instead of comparing",
    )


@pytest.fixture
def update_snapshots(request):
    """Fixture to check if snapshots should be updated."""
    return request.config.getoption("--update-snapshots")


@pytest.fixture
def snapshot(request):
    """
    Fixture for snapshot testing.

    Usage:
        def test_example(snapshot, tmp_path):
            report_path = tmp_path / "report.json"
            report_path.write_text(render(report))
            snapshot.assert_match(report_path)
    """
    test_name = request.node.name
    update_snapshots_flag = request.config.getoption("--update-snapshots")

    return SnapshotAssertion(test_name, update_snapshots_flag)


@pytest.fixture
def coin_model_path():
    """Path of the bundled biased-coin chain (goal reached with probability 0.9)."""
    return REPO_ROOT / "coin.dtmc"


@pytest.fixture
def coin_model(coin_model_path):
    return load_model(coin_model_path)


@pytest.fixture
def nested_model_path():
    return REPO_ROOT / "nested.dtmc"


@pytest.fixture
def nested_model(nested_model_path):
    return load_model(nested_model_path)


@pytest.fixture
def repair_model_path():
    return REPO_ROOT / "repair.ctmc"


@pytest.fixture
def repair_model(repair_model_path):
    return load_model(repair_model_path)


@pytest.fixture
def two_state_model():
    """Deterministic chain 0 -> 1 -> 1 with state 1 labelled ``done``."""
    return parse_model(
        """
        dtmc
        states 2
        init 0
        label done 1
        trans 0 1 1.0
        trans 1 1 1.0
        """
    )
