"""Pytest configuration for spin-photon-toolkit tests."""

import numpy as np
import pytest


def pytest_addoption(parser):
    parser.addoption(
        "--slow",
        action="store_true",
        default=False,
        help="Run slow tests (full-resolution sweeps, large Monte Carlo runs)",
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: mark test as slow (needs --slow to run)")


def pytest_collection_modifyitems(config, items):
    if not config.getoption("--slow"):
        skip_slow = pytest.mark.skip(reason="need --slow option to run")
        for item in items:
            if "slow" in item.keywords:
                item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(20240617)


@pytest.fixture
def blue_star():
    from spin_photon_toolkit.config import resolve_config

    return resolve_config(preset="paper-blue-star")


@pytest.fixture
def red_star():
    from spin_photon_toolkit.config import resolve_config

    return resolve_config(preset="paper-red-star")
