import numpy as np
import pytest

from polarlattice import _kernels
from polarlattice.lattice import design_lattice


def pytest_configure(config):
    # pay the compile cost once, before any timed assertions
    if _kernels.NUMBA_ACTIVE:
        _kernels.warmup()


@pytest.fixture(scope="session")
def design_1024():
    """Reference design at the headline operating point."""
    return design_lattice(sigma=0.3488, target_pe=5e-5, n=1024)


@pytest.fixture(scope="session")
def design_256():
    """Small design used by the simulation-heavy tests."""
    return design_lattice(sigma=0.3488, target_pe=5e-5, n=256)


@pytest.fixture
def rng():
    return np.random.default_rng(20240816)
