# ---- This is <test_potential.py> ----

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import multiwell_lab.MW_errors as MW_err
import multiwell_lab.MW_potential as MW_pot

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

GL_BLOCK = {
    'name': 'gl-polynomial',
    'k': 1,
    'terms': [{'coef': 0.25, 'powers': [0]}, {'coef': -0.5, 'powers': [2]}, {'coef': 0.25, 'powers': [4]}],
    'wells': [[-1.0], [1.0]],
}

# -------------------------------------------------------------------------- #

@pytest.mark.parametrize('name, k, q', [('gl-scalar', 1, 2), ('triple-well-2d', 2, 3)])
def test_builtin_registry(name, k, q):
    p = MW_pot.get_potential(name)
    assert p.k == k
    assert p.q == q
    assert np.allclose(p.V(p.sigma), 0.0)

def test_unknown_potential_name():
    with pytest.raises(MW_err.ConfigError):
        MW_pot.get_potential('no-such-potential')

# -------------------------------------------------------------------------- #

@pytest.mark.parametrize('name', ['gl-scalar', 'triple-well-2d'])
def test_builtin_potentials_meet_hypotheses(name):
    report = MW_pot.validate_hypotheses(MW_pot.get_potential(name))
    assert report.passed
    assert [c.name for c in report.checks] == ['H1', 'H2', 'H3']
    assert report['H2'].passed

def test_sample_budget_floor(gl):
    with pytest.raises(ValueError):
        MW_pot.validate_hypotheses(gl, sample_budget=10)

def test_non_critical_well(gl):
    p = MW_pot.make_potential('shifted', 1, [[-1.0], [0.9]], gl.eval_fn, gl.grad_fn, gl.hess_fn)
    with pytest.raises(MW_err.WellNotCritical):
        MW_pot.validate_hypotheses(p)

def test_non_finite_evaluation(gl):
    def V(y):
        return np.where(np.abs(y[..., 0]) > 3.0, np.inf, gl.V(y))
    p = MW_pot.make_potential('blowing', 1, [[-1.0], [1.0]], V, gl.grad_fn, gl.hess_fn)
    with pytest.raises(MW_err.NonFiniteEvaluation):
        MW_pot.validate_hypotheses(p)

def test_degenerate_well_fails_h2():
    p = MW_pot.make_potential(
        'flat', 1, [[-1.0], [1.0]],
        lambda y: 0.25 * (1.0 - y[..., 0]**2)**4,
        lambda y: (-2.0 * y[..., 0] * (1.0 - y[..., 0]**2)**3)[..., None],
        lambda y: (-2.0 * (1.0 - y[..., 0]**2)**3 + 12.0 * y[..., 0]**2 * (1.0 - y[..., 0]**2)**2)[..., None, None],
    )
    report = MW_pot.validate_hypotheses(p)
    assert not report['H2'].passed
    assert not report.passed

# -------------------------------------------------------------------------- #

def test_polynomial_block_matches_gl(gl):
    p = MW_pot.get_potential(GL_BLOCK)
    y = np.linspace(-2.0, 2.0, 41)[:, None]
    assert p.name == 'gl-polynomial'
    assert np.allclose(p.V(y), gl.V(y))
    assert np.allclose(p.grad(y), gl.grad(y))
    assert np.allclose(p.hess(y), gl.hess(y))

def test_polynomial_block_missing_key():
    block = {key: value for key, value in GL_BLOCK.items() if key != 'wells'}
    with pytest.raises(MW_err.ConfigError):
        MW_pot.get_potential(block)

def test_finite_difference_derivatives(triple):
    p = MW_pot.make_potential('triple-fd', 2, triple.sigma, triple.eval_fn)
    y = np.array([[0.3, -0.2], [1.5, 0.7], [-0.4, 0.9]])
    assert not p.exact_derivatives
    assert np.allclose(p.grad(y), triple.grad(y), rtol=1e-5, atol=1e-6)
    assert np.allclose(p.hess(y), triple.hess(y), rtol=1e-3, atol=1e-3)

# -------------------------------------------------------------------------- #

def test_derived_constants_gl(gl, c_gl):
    assert 0.0 < c_gl.mu0 <= 0.5
    assert c_gl.lambda0 == pytest.approx(2.0)
    assert c_gl.alpha0 == pytest.approx(0.5 * c_gl.lambda0 * c_gl.mu0**2)
    assert c_gl.c_unf == pytest.approx(np.sqrt(4.0 / np.sqrt(2.0) + 1.0))
    checks = MW_pot.structural_checks(gl, c_gl.mu0)
    assert checks['sandwich'] and checks['extrut'] and checks['disjoint']

def test_shrink_is_monotone(gl, c_gl):
    # the radius before the last shrink round fails
    if c_gl.shrink_rounds:
        checks = MW_pot.structural_checks(gl, 2.0 * c_gl.mu0)
        assert not (checks['sandwich'] and checks['extrut'] and checks['disjoint'])

def test_constants_from_mu0(gl):
    c = MW_pot.constants_from_mu0(gl, 0.5)
    assert c.mu0 == 0.5
    assert c.alpha0 == pytest.approx(0.25)
    assert c.R0 == pytest.approx(1.0)
    assert 0.0 < c.beta_inf <= 0.25 * gl.alpha_inf

def test_derive_constants_bad_shrink(gl):
    with pytest.raises(ValueError):
        MW_pot.derive_constants(gl, shrink_factor=1.5)

def test_quadratic_envelope(gl, c_gl, triple, c_triple):
    assert MW_pot.quadratic_envelope_check(gl, c_gl).passed
    assert MW_pot.quadratic_envelope_check(triple, c_triple).passed

def test_transition_cost_gl(gl):
    assert MW_pot.segment_transition_cost(gl, 0, 1) == pytest.approx(2.0 * np.sqrt(2.0) / 3.0, rel=1e-5)

# -------------------------------------------------------------------------- #

@given(frac=st.floats(min_value=-1.0, max_value=1.0, allow_nan=False))
@settings(max_examples=200, deadline=None)
def test_nearest_well_certified_near_wells(frac):
    p = MW_pot.get_potential('gl-scalar')
    c = MW_pot.constants_from_mu0(p, 0.0625)
    y = 1.0 + 0.5 * c.mu0 * frac
    index, distance, certified = MW_pot.nearest_well(p, c, [y])
    assert index == 1
    assert certified
    assert distance <= np.sqrt(4.0 * p.V(np.array([[y]]))[0] / c.lambda0) + 1e-12

def test_nearest_well_far_point_not_certified(gl, c_gl):
    _, _, certified = MW_pot.nearest_well(gl, c_gl, [0.0])
    assert not certified

# -------------------------------------------------------------------------- #

# ---- End of <test_potential.py> ----
