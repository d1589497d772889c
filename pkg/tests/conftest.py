from __future__ import annotations

import numpy as np
import pytest

from efrl.fields import GridSpec, VelocityField, leray_project
from efrl.solver import decaying_spectrum, init_decaying_turbulence


def pytest_addoption(parser):
    parser.addoption(
        "--run_slow",
        action="store_true",
        default=False,
        help="Also run the slow, full-size checks.",
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-size run, minutes to hours")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run_slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --run_slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def grid16():
    return GridSpec(16)


@pytest.fixture
def random_field(rng):
    def make(grid: GridSpec, divergence_free: bool = False) -> VelocityField:
        u = VelocityField.from_stacked(grid, rng.standard_normal((2, *grid.shape)))
        return leray_project(u) if divergence_free else u

    return make


@pytest.fixture
def turbulent32():
    """A small decaying-turbulence field with energy 0.5."""
    return init_decaying_turbulence(GridSpec(32), decaying_spectrum(4.0), 0.5, seed=7)


def taylor_green(grid: GridSpec, amplitude: float = 1.0) -> VelocityField:
    return VelocityField.from_function(
        grid,
        lambda x, y: (
            amplitude * np.sin(2 * np.pi * x) * np.cos(2 * np.pi * y),
            -amplitude * np.cos(2 * np.pi * x) * np.sin(2 * np.pi * y),
        ),
    )
