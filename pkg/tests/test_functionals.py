# ---- This is <test_functionals.py> ----

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import multiwell_lab.MW_functionals as MW_fun
import multiwell_lab.MW_grid_field as MW_gf
import multiwell_lab.MW_potential as MW_pot

from conftest import interface_field

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

SIGMA_GL = 2.0 * np.sqrt(2.0) / 3.0

OFF_CENTER = MW_gf.DiskSpec((0.5, 0.6), 0.25)

# -------------------------------------------------------------------------- #

def test_interface_energy_per_length(interface, gl):
    E, V_mass = MW_fun.energy_on_region(interface, gl)
    assert E == pytest.approx(SIGMA_GL, rel=2e-2)
    # equipartition
    assert V_mass == pytest.approx(0.5 * E, rel=2e-2)

def test_interface_discrepancy_is_small(interface, gl):
    density = MW_fun.energy_density(interface, gl)
    xi_min = MW_fun.interior_discrepancy_min(interface, gl)
    assert xi_min >= -1e-2 * np.max(density.e)

def test_gradient_bound_of_interface(interface):
    assert MW_fun.gradient_bound_profile(interface) == pytest.approx(1.0 / np.sqrt(2.0), rel=1e-2)

# -------------------------------------------------------------------------- #

@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), eps=st.floats(0.02, 0.5))
def test_pointwise_relations(seed, eps):
    rng = np.random.default_rng(seed)
    grid = MW_gf.rectangle_grid([0.0, 1.0, 0.0, 1.0], 1.0 / 16)
    p = MW_pot.get_potential('triple-well-2d')
    f = MW_gf.make_field(grid, rng.uniform(-1.5, 1.5, grid.shape + (2,)), eps)

    density = MW_fun.energy_density(f, p)
    assert np.all(density.j <= density.e * (1.0 + 1e-12) + 1e-300)

    stress = MW_fun.stress_tensor(f, p)
    assert np.array_equal(stress.T[..., 0, 0], -stress.T[..., 1, 1])
    assert np.allclose(stress.A[..., 0, 0] + stress.A[..., 1, 1], 2.0 * density.v)

    hopf = MW_fun.hopf_differential(f)
    modulus = np.hypot(hopf.omega_re, hopf.omega_im)
    assert np.all(modulus <= eps * density.grad_sq * (1.0 + 1e-12) + 1e-12)

def test_hopf_of_axis_aligned_interfaces(square):
    horizontal = MW_fun.hopf_differential(interface_field(square, 0.1))
    assert np.all(horizontal.omega_im == 0.0)
    assert np.all(horizontal.omega_re <= 0.0)

    vertical = MW_fun.hopf_differential(interface_field(square, 0.1, angle=np.pi / 2))
    assert np.all(vertical.omega_re >= -1e-12)

def test_hopf_of_tilted_interface(fine_square):
    angle = np.pi / 6
    hopf = MW_fun.hopf_differential(interface_field(fine_square, 0.05, angle=angle))
    omega = (hopf.omega_re + 1j * hopf.omega_im) * np.exp(2j * angle)

    inner = fine_square.inside
    sel = inner & (np.abs(omega) > 1e-3 * np.max(np.abs(omega[inner])))
    assert np.any(sel)
    assert np.all(np.abs(omega[sel].imag) <= 0.02 * np.abs(omega[sel]))
    assert np.all(omega[sel].real < 0.0)

# -------------------------------------------------------------------------- #

def test_bump_derivatives(fine_square):
    h = fine_square.h
    for X in MW_fun.bump_test_fields(fine_square, (0.5, 0.5), 0.45):
        for i in range(2):
            d_dy, d_dx = np.gradient(X.X[..., i], h)
            inner = (slice(1, -1), slice(1, -1))
            scale = np.max(np.abs(X.DX))
            assert np.allclose(X.DX[..., i, 0][inner], d_dx[inner], atol=2e-2 * scale), X.name
            assert np.allclose(X.DX[..., i, 1][inner], d_dy[inner], atol=2e-2 * scale), X.name

def test_bump_support(square):
    for X in MW_fun.bump_test_fields(square, (0.5, 0.5), 0.2):
        XX, YY = square.XY
        outside = np.hypot(XX - 0.5, YY - 0.5) >= 0.2
        assert np.all(X.X[outside] == 0.0)

def test_stress_identity_on_exact_solution(interface, gl):
    grad = MW_gf.gradient(interface)
    for X in MW_fun.bump_test_fields(interface.grid, (0.5, 0.55), 0.25):
        res = MW_fun.stress_divergence_residual(interface, gl, X, grad=grad)
        assert abs(res.real - res.complex) <= 1e-10 * max(res.scale, 1.0), X.name
        assert abs(res.real) <= 0.05 * res.scale, X.name

# -------------------------------------------------------------------------- #

def test_pohozaev_identity(interface, gl):
    res = MW_fun.pohozaev_residual(interface, gl, OFF_CENTER)
    assert res.lhs > 0.0
    assert abs(res.residual) <= 0.05 * res.lhs

def test_pohozaev_residual_converges(gl):
    residuals = []
    for h in (1.0 / 80, 1.0 / 160):
        grid = MW_gf.rectangle_grid([0.0, 1.0, 0.0, 1.0], h)
        res = MW_fun.pohozaev_residual(interface_field(grid, 0.05), gl, OFF_CENTER)
        residuals.append(abs(res.residual))
    assert residuals[1] * 1.5 <= residuals[0]

def test_pohozaev_inequality(interface, gl):
    record = MW_fun.pohozaev_inequality_check(interface, gl, OFF_CENTER)
    assert record.passed
    assert record.value <= record.bound

def test_monotonicity(interface, gl):
    table = MW_fun.monotonicity_profile(interface, gl, (0.5, 0.5), [0.1, 0.15, 0.2, 0.25, 0.3])
    assert table.records[0].passed
    assert np.all(table.ratio > 0.0)
    assert table.ratio[-1] == pytest.approx(2.0 * SIGMA_GL, rel=0.1)

def test_monotonicity_needs_three_radii(interface, gl):
    with pytest.raises(ValueError):
        MW_fun.monotonicity_profile(interface, gl, (0.5, 0.5), [0.1, 0.2])

# -------------------------------------------------------------------------- #

def test_plateau_shape():
    mu0 = 0.2
    t = np.linspace(0.0, 2.0 * mu0, 4001)
    w = MW_fun.plateau(t, mu0)

    assert np.allclose(w[t <= 0.5 * mu0], t[t <= 0.5 * mu0])
    assert np.allclose(w[t >= mu0], 0.75 * mu0)
    assert np.all(np.diff(w) >= -1e-15)
    assert np.max(np.abs(np.diff(w))) <= (t[1] - t[0]) * (1.0 + 1e-9)

def test_modica_mortola_on_interface(interface, gl, c_gl):
    i = int(np.argmax(gl.sigma[:, 0]))
    mm = MW_fun.modica_mortola_map(interface, gl, c_gl, i)
    assert mm.violation_fraction == 0.0
    assert all(r.passed for r in mm.records)

def test_modica_mortola_bad_well(interface, gl, c_gl):
    with pytest.raises(ValueError):
        MW_fun.modica_mortola_map(interface, gl, c_gl, 2)

def test_potential_domination(interface, gl, c_gl):
    unit = MW_gf.rescale_to_unit(interface, MW_gf.DiskSpec((0.5, 0.5), 0.25))
    c_t, n_nodes = MW_fun.potential_domination_check(unit, gl, c_gl)
    assert n_nodes > 0
    assert c_t >= 1.0

# -------------------------------------------------------------------------- #

# ---- End of <test_functionals.py> ----
