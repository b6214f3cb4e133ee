# ---- This is <test_solver.py> ----

import numpy as np
import pytest

import multiwell_lab.MW_errors as MW_err
import multiwell_lab.MW_grid_field as MW_gf
import multiwell_lab.MW_potential as MW_pot
import multiwell_lab.MW_solver as MW_sol

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

@pytest.fixture(scope='module')
def family():
    p = MW_pot.get_potential('gl-scalar')
    return MW_sol.solve_family('two-phase:0', p, [0.25, 0.125], cells_per_eps=4)

# -------------------------------------------------------------------------- #

@pytest.mark.parametrize('kwargs', [
    {'flow_dt_safety': 1.5},
    {'residual_tol': 0.0},
    {'seed_strategy': 'random'},
])
def test_solve_config_rejects(kwargs):
    with pytest.raises(ValueError):
        MW_sol.SolveConfig(**kwargs)

# -------------------------------------------------------------------------- #

def test_constant_well_boundary(square, triple):
    values = MW_sol.boundary_values('constant-well:2', square, triple, 0.1)
    assert values.shape == square.shape + (2,)
    assert np.allclose(values, triple.sigma[2])

def test_two_phase_boundary(square, gl):
    values = MW_sol.boundary_values('two-phase:0', square, gl, 0.05)
    assert np.allclose(values[0, :, 0], -1.0, atol=1e-5)
    assert np.allclose(values[-1, :, 0], 1.0, atol=1e-5)
    # the interface runs along x through the centre
    assert np.allclose(values[16, :, 0], 0.0)

def test_three_phase_boundary(square, triple):
    values = MW_sol.boundary_values('three-phase:90,210,330', square, triple, 0.02)
    assert np.all(np.isfinite(values))
    assert np.all(np.linalg.norm(values, axis=-1) <= 1.0 + 1e-12)
    # far inside a sector the data sits at one well
    _, dist = MW_pot.nearest_well_field(triple, values[[0, -1], [0, -1]])
    assert np.all(dist < 1e-3)

@pytest.mark.parametrize('spec', [
    'constant-well:5',
    'three-phase:0,120,240',
    'two-phase:abc',
    'spiral:3',
    'no-colon',
    {'file': 'trace.csv'},
])
def test_invalid_boundary(square, gl, spec):
    with pytest.raises(MW_err.ConfigError):
        MW_sol.boundary_values(spec, square, gl, 0.1)

def test_trace_boundary(tmp_path, square, gl, triple):
    theta = np.linspace(-np.pi, np.pi, 65)[:-1]
    path = tmp_path / 'trace.csv'
    np.savetxt(path, np.column_stack([theta, np.cos(theta)]), delimiter=',')

    values = MW_sol.boundary_values({'trace_csv': str(path)}, square, gl, 0.1)
    # node (x=1, y=0.5) sits at angle 0 seen from the centre
    assert values[16, 32, 0] == pytest.approx(1.0)
    assert values[16, 0, 0] == pytest.approx(-1.0)

    with pytest.raises(MW_err.ConfigError):
        MW_sol.boundary_values({'trace_csv': str(path)}, square, triple, 0.1)
    with pytest.raises(MW_err.ConfigError):
        MW_sol.boundary_values({'trace_csv': str(tmp_path / 'missing.csv')}, square, gl, 0.1)

# -------------------------------------------------------------------------- #

def test_harmonic_extension_reproduces_linear_data(square):
    X, Y = square.XY
    data = (2.0 * X - 3.0 * Y + 1.0)[..., None]
    values = MW_sol.harmonic_extension(square, data)
    assert np.allclose(values, data, atol=1e-10)

def test_initial_guess_strategies(square, gl):
    data = MW_sol.boundary_values('two-phase:0', square, gl, 0.1)
    pinned = square.active & ~square.inside

    voronoi = MW_sol.initial_guess(square, data, gl, 'from-wells-voronoi')
    assert np.all(np.isin(voronoi[square.inside, 0], [-1.0, 1.0]))
    assert np.array_equal(voronoi[pinned], data[pinned])

    supplied = MW_sol.initial_guess(square, data, gl, 'supplied', supplied=np.zeros(square.shape + (1,)))
    assert np.all(supplied[square.inside] == 0.0)
    assert np.array_equal(supplied[pinned], data[pinned])

    with pytest.raises(ValueError):
        MW_sol.initial_guess(square, data, gl, 'supplied')

# -------------------------------------------------------------------------- #

def test_relax_refuses_coarse_grid(square, gl):
    f = MW_gf.make_field(square, np.zeros(square.shape), 0.1)
    with pytest.raises(ValueError):
        MW_sol.relax(f, gl)

def test_relax_decreases_energy(square, gl):
    eps = 0.25
    data = MW_sol.boundary_values('two-phase:0', square, gl, eps)
    seed = MW_sol.initial_guess(square, data, gl)
    rng = np.random.default_rng(1)
    noise = rng.uniform(-0.3, 0.3, square.shape + (1,))
    seed[square.inside] = np.clip(seed[square.inside] + noise[square.inside], -1.0, 1.0)

    f = MW_gf.make_field(square, seed, eps)
    relaxed, history = MW_sol.relax(f, gl, steps=100, return_history=True)

    assert len(history) >= 2
    assert np.all(np.diff(history) <= 1e-10 * history[0])
    assert history[-1] < history[0]
    assert np.array_equal(relaxed.values[~square.inside], f.values[~square.inside])

def test_newton_flags_under_resolved_grid(square, gl):
    eps = square.h
    data = MW_sol.boundary_values('two-phase:0', square, gl, eps)
    f = MW_gf.make_field(square, MW_sol.initial_guess(square, data, gl), eps)
    try:
        result = MW_sol.newton_refine(f, gl, MW_sol.SolveConfig(newton_max_iters=5))
    except MW_err.StagnationError:
        return
    assert result.under_resolved
    assert np.all(np.isfinite(result.field.values))

# -------------------------------------------------------------------------- #

def test_family_converges(family):
    assert len(family) == 2
    assert [r.epsilon for r in family] == [0.25, 0.125]
    for r in family:
        assert r.converged
        assert r.failure is None
        assert r.residual_history[-1] <= MW_sol.SolveConfig().residual_tol
        assert r.max_amplitude <= 1.0 + 1e-6
        assert r.family_M0 == pytest.approx(max(m.energy for m in family))

def test_family_residual_and_weak_form(family, gl):
    for r in family:
        f = r.field
        assert MW_sol.scaled_residual(f, gl) <= MW_sol.SolveConfig().residual_tol
        assert MW_sol.weak_form_residual(f, gl) <= (f.grid.h / f.epsilon)**2

def test_family_max_principle(family, gl, c_gl):
    for r in family:
        assert all(rec.passed for rec in MW_sol.max_principle_check(r, gl, c_gl))

def test_family_arguments(gl):
    assert MW_sol.solve_family('two-phase:0', gl, []) == []
    with pytest.raises(ValueError):
        MW_sol.solve_family('two-phase:0', gl, [0.1, 0.2])
    with pytest.raises(ValueError):
        MW_sol.solve_family('two-phase:0', gl, [0.2, 0.1], cells_per_eps=2)

# -------------------------------------------------------------------------- #

# ---- End of <test_solver.py> ----
