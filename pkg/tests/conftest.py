# ---- This is <conftest.py> ----

"""
Shared fixtures: built-in potentials, small grids and analytic tanh interfaces
"""

import numpy as np
import pytest

import multiwell_lab.MW_potential as MW_pot
import multiwell_lab.MW_grid_field as MW_gf

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def tanh_profile(s, eps):
    """Heteroclinic profile of the scalar GL equation eps^2 u'' = u^3 - u"""
    return np.tanh(s / (np.sqrt(2.0) * eps))

# -------------------------------------------------------------------------- #

def interface_field(grid, eps, angle=0.0, center=None):
    """Exact GL solution with a straight interface through center

    The interface direction is (cos angle, sin angle); u = -1 below and +1 above it.
    """

    if center is None:
        center = grid.center
    X, Y = grid.XY
    s = -(X - center[0]) * np.sin(angle) + (Y - center[1]) * np.cos(angle)
    return MW_gf.make_field(grid, tanh_profile(s, eps), eps)

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

@pytest.fixture(scope='session')
def gl():
    return MW_pot.get_potential('gl-scalar')

@pytest.fixture(scope='session')
def triple():
    return MW_pot.get_potential('triple-well-2d')

@pytest.fixture(scope='session')
def c_gl(gl):
    return MW_pot.derive_constants(gl)

@pytest.fixture(scope='session')
def c_triple(triple):
    return MW_pot.derive_constants(triple)

# -------------------------------------------------------------------------- #

@pytest.fixture
def square():
    return MW_gf.rectangle_grid([0.0, 1.0, 0.0, 1.0], 1.0 / 32)

@pytest.fixture
def fine_square():
    return MW_gf.rectangle_grid([0.0, 1.0, 0.0, 1.0], 1.0 / 160)

@pytest.fixture
def unit_disk():
    return MW_gf.disk_grid((0.0, 0.0), 1.0, 1.0 / 32)

# -------------------------------------------------------------------------- #

@pytest.fixture
def interface(fine_square):
    """Horizontal GL interface at eps = 0.05, h = eps / 8"""
    return interface_field(fine_square, 0.05)

@pytest.fixture
def constant_field(square, gl):
    return MW_gf.make_field(square, np.full(square.shape, 1.0), 0.1)

# -------------------------------------------------------------------------- #

# ---- End of <conftest.py> ----
