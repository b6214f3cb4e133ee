# ---- This is <test_clearing.py> ----

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import multiwell_lab.MW_clearing as MW_clr
import multiwell_lab.MW_lab_config as MW_conf
import multiwell_lab.MW_errors as MW_err
import multiwell_lab.MW_grid_field as MW_gf
import multiwell_lab.MW_solver as MW_sol

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

CENTER_DISK = MW_gf.DiskSpec((0.5, 0.5), 0.25)

SIGMA_GL = 2.0 * np.sqrt(2.0) / 3.0

def _member(f, failure=None):
    return MW_sol.SolveResult(
        field = f,
        residual_history = [],
        converged = failure is None,
        energy = 0.0,
        max_amplitude = 1.0,
        failure = failure,
        epsilon = f.epsilon,
    )

def _center_mask(grid, radius):
    X, Y = grid.XY
    return grid.active & (np.hypot(X - 0.5, Y - 0.5) <= radius)

# -------------------------------------------------------------------------- #

@settings(max_examples=50, deadline=None)
@given(
    a0=st.floats(-5.0, 5.0),
    c0=st.floats(1.1, 3.0),
    f=st.lists(st.floats(0.0, 5.0), min_size=1, max_size=8),
    seed=st.integers(0, 2**16),
)
def test_sequence_lemma_lower_bound(a0, c0, f, seed):
    rng = np.random.default_rng(seed)
    a = [a0]
    for fk in f:
        a.append(c0 * a[-1] - fk + rng.uniform(0.0, 1.0))

    hypothesis, dominates = MW_clr.sequence_dominates(a, c0, f)
    assert hypothesis
    assert dominates

def test_sequence_lemma_exact_recursion():
    f = [1.0, 0.5, 0.25]
    a = [2.0]
    for fk in f:
        a.append(2.0 * a[-1] - fk)
    assert np.allclose(MW_clr.sequence_lemma(2.0, 2.0, f), a)

def test_sequence_lemma_rejects():
    hypothesis, _ = MW_clr.sequence_dominates([1.0, 0.0], 2.0, [1.0])
    assert not hypothesis
    with pytest.raises(ValueError):
        MW_clr.sequence_lemma(1.0, 1.0, [0.0])

# -------------------------------------------------------------------------- #

def test_eta1_estimate():
    assert MW_clr.eta1_estimate(1.0) == pytest.approx(np.exp(-1.0) / 16.0)
    assert MW_clr.eta1_estimate(0.0) == 1.0
    assert MW_clr.eta1_estimate(0.01) == 1.0
    assert MW_clr.eta1_estimate(2.0) < MW_clr.eta1_estimate(1.0)

def test_dyadic_energies_super_exponential():
    energies = [0.07]
    for _ in range(5):
        energies.append(energies[-1]**1.5)
    radii = 2.0**-np.arange(6)

    trace = MW_clr.analyze_dyadic_energies(radii, energies, 1e-5, 0.5)
    assert trace.n_eps == 4
    assert trace.meray_premise
    assert trace.eta1 == pytest.approx(np.exp(-1.0 - 2.0 * np.log(2.0)))
    assert all(rec.passed for rec in trace.records)
    assert len([rec for rec in trace.records if rec.details.get('kind') == 'super-exponential decay']) == 4

def test_dyadic_energies_must_be_nested():
    trace = MW_clr.analyze_dyadic_energies([1.0, 0.5, 0.25], [0.1, 0.2, 0.05], 1e-3, 1.0)
    nested = [rec for rec in trace.records if rec.details.get('kind') == 'nested energies']
    assert not nested[0].passed

# -------------------------------------------------------------------------- #

def test_decay_check(interface, gl):
    check = MW_clr.decay_check(interface, gl, disk=CENTER_DISK)
    assert check.lhs > 0.0
    assert 0.0 < check.c_min < np.inf

    ok = MW_clr.decay_check(interface, gl, c_dec=1.01 * check.c_min, disk=CENTER_DISK)
    assert ok.records[0].passed
    bad = MW_clr.decay_check(interface, gl, c_dec=0.5 * check.c_min, disk=CENTER_DISK)
    assert not bad.records[0].passed

    assert MW_clr.fit_decay_constant([check, ok]) == pytest.approx(check.c_min)

def test_decay_check_near_well(constant_field, gl):
    assert MW_clr.decay_check(constant_field, gl, disk=CENTER_DISK).c_min == 0.0

def test_decay_check_rejects(interface, gl):
    with pytest.raises(ValueError):
        MW_clr.decay_check(interface, gl)
    with pytest.raises(MW_err.DiskOutsideDomain):
        MW_clr.decay_check(interface, gl, disk=MW_gf.DiskSpec((0.1, 0.5), 0.25))

def test_iterate_dyadic_on_disk_domain(unit_disk, gl):
    f = MW_gf.make_field(unit_disk, np.ones(unit_disk.shape), 0.05)
    trace = MW_clr.iterate_dyadic(f, gl, c_dec=1.0)
    assert trace.radii[0] == 1.0
    assert trace.radii[-1] >= 0.05
    assert np.allclose(trace.energies, 0.0)

# -------------------------------------------------------------------------- #

def test_clearing_out_near_well(constant_field, gl, c_gl):
    verdict = MW_clr.clearing_out_check(constant_field, gl, c_gl, CENTER_DISK, 0.1, c_nrg=1.0)
    assert verdict.premise
    assert verdict.passed
    assert verdict.sigma == int(np.argmax(gl.sigma[:, 0]))
    assert verdict.sup_dist == pytest.approx(0.0, abs=1e-12)

def test_clearing_out_premise_fails_on_interface(interface, gl, c_gl):
    verdict = MW_clr.clearing_out_check(interface, gl, c_gl, CENTER_DISK, 0.1)
    assert verdict.vacuous
    assert verdict.passed
    assert verdict.ratio > 1.0

def test_clearing_out_rejects(constant_field, gl, c_gl):
    with pytest.raises(ValueError):
        MW_clr.clearing_out_check(constant_field, gl, c_gl, MW_gf.DiskSpec((0.5, 0.5), 0.05), 0.1)
    with pytest.raises(MW_err.DiskOutsideDomain):
        MW_clr.clearing_out_check(constant_field, gl, c_gl, MW_gf.DiskSpec((0.9, 0.5), 0.25), 0.1)

def test_clearing_consistency(constant_field, gl, c_gl):
    record, verdicts = MW_clr.clearing_consistency(constant_field, gl, c_gl, (0.5, 0.5), [0.2, 0.4, 0.3], 0.1)
    assert record.passed
    assert [v.disk.radius for v in verdicts] == [0.4, 0.3, 0.2]

# -------------------------------------------------------------------------- #

def test_sample_disks(square):
    disks = MW_clr.sample_disks(square, 0.01)
    assert disks
    assert all(MW_gf.contains_disk(square, d) for d in disks)
    assert min(d.radius for d in disks) >= 0.04

def test_sample_disks_off_center(fine_square):
    disks = MW_clr.sample_disks(fine_square, 0.05)
    radii = sorted({d.radius for d in disks})
    assert radii[0] == pytest.approx(0.2)
    assert len(radii) >= 3
    assert len(disks) >= MW_conf.ETA0_TARGET_DISKS
    assert sum(d.center != (0.5, 0.5) for d in disks) > 0.9 * len(disks)

    # a family 0.1, 0.05 on the unit square reaches the disk target
    coarse = MW_clr.sample_disks(MW_gf.rectangle_grid([0.0, 1.0, 0.0, 1.0], 1.0 / 80), 0.1)
    assert coarse
    assert min(d.radius for d in coarse) == pytest.approx(0.4)

def test_eta0_scan_near_well(constant_field, gl, c_gl):
    disks = [CENTER_DISK, MW_gf.DiskSpec((0.3, 0.3), 0.2)]
    scan = MW_clr.eta0_scan([_member(constant_field)], gl, c_gl, disks=disks, min_disks=2)
    assert scan.n_disks == 2
    assert scan.n_failing == 0
    assert scan.eta0 == 2.0

def test_eta0_scan_too_few_disks(constant_field, gl, c_gl):
    with pytest.raises(MW_err.DegenerateFamily):
        MW_clr.eta0_scan([_member(constant_field)], gl, c_gl, disks=[CENTER_DISK])

def test_eta0_scan_interface(interface, constant_field, gl, c_gl):
    scan = MW_clr.eta0_scan([_member(interface)], gl, c_gl)
    assert scan.n_disks >= MW_conf.ETA0_TARGET_DISKS
    assert scan.n_failing >= 1
    failing = min(row['ratio'] for row in scan.table if not row['passed'])
    assert scan.eta0 == np.nextafter(failing, -np.inf)

    # off-center disks clipping the interface fail below the interface density 2 sigma
    assert scan.eta0 < 2.0 * SIGMA_GL * 0.9

    # more members can only lower eta0
    both = MW_clr.eta0_scan([_member(constant_field), _member(interface)], gl, c_gl)
    assert both.eta0 <= scan.eta0

def test_eta0_scan_degenerate(constant_field, gl, c_gl):
    with pytest.raises(MW_err.DegenerateFamily):
        MW_clr.eta0_scan([_member(constant_field, failure='BlowUp')], gl, c_gl)

# -------------------------------------------------------------------------- #

def test_kappacity_near_well(unit_disk, gl, c_gl):
    f = MW_gf.make_field(unit_disk, np.ones(unit_disk.shape), 0.4)
    report = MW_clr.kappacity_check(f, gl, c_gl, 0.75, 0.25 * c_gl.mu0, c_ups=1.0)
    assert report.c_min == 0.0
    assert all(rec.passed for rec in report.records)
    assert MW_clr.kappacity_linearity(f, gl, c_gl, 0.75, 0.25 * c_gl.mu0).passed

def test_kappacity_boundary_violated(interface, gl, c_gl):
    with pytest.raises(MW_err.BoundaryConditionViolated):
        MW_clr.kappacity_check(interface, gl, c_gl, 0.75, 0.25 * c_gl.mu0, disk=CENTER_DISK)

def test_borneo(unit_disk, interface, gl):
    f = MW_gf.make_field(unit_disk, np.ones(unit_disk.shape), 0.4)
    quiet = MW_clr.borneo_check(f, gl, 1.0, c_pot=1.0)
    assert quiet.premise
    assert quiet.c_min == 0.0
    assert all(rec.passed for rec in quiet.records)

    loud = MW_clr.borneo_check(interface, gl, 0.1, c_pot=1.0, disk=CENTER_DISK)
    assert not loud.premise
    assert loud.lhs > 0.0
    assert all(rec.passed for rec in loud.records)

# -------------------------------------------------------------------------- #

def test_exterior_bound(interface, gl):
    U = _center_mask(interface.grid, 0.1)
    report = MW_clr.exterior_bound_check(interface, gl, U, 0.2)
    assert report.lhs > 0.0
    assert 0.0 < report.c_min < np.inf
    assert report.terms['shell'] > 0.0

    checked = MW_clr.exterior_bound_check(interface, gl, U, 0.2, K_ext=10.0, c_ext=1.01 * report.c_min)
    assert checked.premise
    assert checked.records[0].passed

def test_exterior_bound_rejects(square, constant_field, gl):
    with pytest.raises(MW_err.MaskGeometryError):
        MW_clr.exterior_bound_check(constant_field, gl, np.ones((3, 3), dtype=bool), 0.1)

    X, _ = square.XY
    with pytest.raises(MW_err.MaskGeometryError):
        MW_clr.exterior_bound_check(constant_field, gl, X <= 0.1, 0.2)

# -------------------------------------------------------------------------- #

# ---- End of <test_clearing.py> ----
