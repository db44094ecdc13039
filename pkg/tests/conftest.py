"""Shared fixtures.

The ground state solve is the one genuinely expensive fixture (a few
seconds of bisection + certification), so it is session scoped and every
test that needs certified norms reuses the same object. Grids are cheap
descriptors but are shared too so the lru-cached meshes behind them are
built once.
"""

import numpy as np
import pytest

from nlslab.grid import Grid, PERIODIC3D, RADIAL1D
from nlslab.groundstate import solve_ground_state


@pytest.fixture(scope="session")
def q():
    return solve_ground_state(r_max=20.0, n=8192, tol=1e-12)


@pytest.fixture(scope="session")
def radial_grid():
    return Grid(RADIAL1D, 8192, 20.0)


@pytest.fixture(scope="session")
def periodic_grid():
    return Grid(PERIODIC3D, 128, 16.0)


@pytest.fixture(scope="session")
def small_periodic():
    """Cheap 3D box for tests that only need qualitative resolution."""
    return Grid(PERIODIC3D, 64, 16.0)


@pytest.fixture(scope="session")
def tiny_periodic():
    return Grid(PERIODIC3D, 32, 16.0)


def gaussian_radial(grid, amp=1.0, width=1.0, chirp=0.0):
    """amp * exp(-(r/width)^2) * exp(i chirp r^2) sampled on a radial grid."""
    r = grid.radii()
    vals = amp * np.exp(-((r / width) ** 2)).astype(complex)
    if chirp != 0.0:
        vals *= np.exp(1j * chirp * r * r)
    return vals


def gaussian_periodic(grid, amp=1.0, width=1.0, center=(0.0, 0.0, 0.0)):
    """Same bump sampled over the 3D box; center well inside the domain."""
    X, Y, Z = grid.meshes()
    rsq = (X - center[0]) ** 2 + (Y - center[1]) ** 2 + (Z - center[2]) ** 2
    return (amp * np.exp(-rsq / width**2)).astype(complex)
