# ---- This is <test_levelsets.py> ----

import numpy as np
import pytest

import multiwell_lab.MW_lab_config as MW_conf
import multiwell_lab.MW_errors as MW_err
import multiwell_lab.MW_grid_field as MW_gf
import multiwell_lab.MW_levelsets as MW_lvl

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

CENTER_DISK = MW_gf.DiskSpec((0.5, 0.5), 0.25)

def _upper(p):
    return int(np.argmax(p.sigma[:, 0]))

# -------------------------------------------------------------------------- #

def test_marching_squares_circle(square):
    X, Y = square.XY
    values = np.hypot(X - 0.5, Y - 0.5)
    segments, n_degenerate, n_cells = MW_lvl.marching_squares(values, square, 0.3)
    assert n_degenerate == 0
    assert n_cells > 0
    assert MW_lvl.polyline_length(segments) == pytest.approx(2.0 * np.pi * 0.3, rel=1e-2)

def test_marching_squares_straight_level(square):
    _, Y = square.XY
    segments, _, n_cells = MW_lvl.marching_squares(Y, square, 0.51)
    assert n_cells == 32
    assert MW_lvl.polyline_length(segments) == pytest.approx(1.0)

    half = np.zeros((32, 32), dtype=bool)
    half[:, :16] = True
    segments, _, _ = MW_lvl.marching_squares(Y, square, 0.51, cell_mask=half)
    assert MW_lvl.polyline_length(segments) == pytest.approx(0.5)

def test_marching_squares_empty(square):
    segments, _, n_cells = MW_lvl.marching_squares(np.zeros(square.shape), square, 1.0)
    assert segments.shape == (0, 2, 2)
    assert n_cells == 0
    assert MW_lvl.polyline_length(segments) == 0.0

def test_line_integral_of_constant(square):
    X, Y = square.XY
    segments, _, _ = MW_lvl.marching_squares(np.hypot(X - 0.5, Y - 0.5), square, 0.3)
    integral = MW_lvl.line_integral(segments, square, np.full(square.shape, 2.0))
    assert integral == pytest.approx(2.0 * MW_lvl.polyline_length(segments))

def test_export_polylines(tmp_path, square):
    _, Y = square.XY
    segments, _, _ = MW_lvl.marching_squares(Y, square, 0.51)
    path = MW_lvl.export_polylines(segments, tmp_path / 'level.csv')
    table = np.loadtxt(path, delimiter=',', skiprows=1)
    assert table.shape == (len(segments), 4)
    assert MW_lvl.export_polylines(segments, tmp_path / 'level.csv') is None

# -------------------------------------------------------------------------- #

def test_good_radius(interface, gl, c_gl):
    r, report = MW_lvl.good_radius(interface, gl, 0.1, 0.3, c=c_gl)
    assert 0.1 <= r <= 0.3
    assert report.radius == pytest.approx(r)
    assert all(rec.passed for rec in report.records if rec.name == 'good_radius')

def test_good_radius_rejects(interface, gl):
    with pytest.raises(ValueError):
        MW_lvl.good_radius(interface, gl, 0.01, 0.3)
    with pytest.raises(MW_err.AnnulusOutsideDomain):
        MW_lvl.good_radius(interface, gl, 0.1, 0.3, x0=(0.1, 0.5))

def test_uniform_bound_near_well(constant_field, gl, c_gl):
    samples = MW_gf.restrict_circle(constant_field, MW_gf.DiskSpec((0.5, 0.5), 0.3))
    report = MW_lvl.circle_uniform_bound(samples, gl, c_gl)
    assert report.case == 1
    assert report.certified
    assert report.sigma_main == _upper(gl)
    assert report.sup_dist == pytest.approx(0.0, abs=1e-12)
    assert all(rec.passed for rec in report.records)

    small = MW_gf.restrict_circle(constant_field, MW_gf.DiskSpec((0.5, 0.5), 0.05))
    with pytest.raises(ValueError):
        MW_lvl.circle_uniform_bound(small, gl, c_gl)

def test_uniform_bound_across_interface(interface, gl, c_gl):
    samples = MW_gf.restrict_circle(interface, MW_gf.DiskSpec((0.5, 0.5), 0.3))
    report = MW_lvl.circle_report(samples, gl, c_gl)
    # half the circle sits at each well
    assert report.case == 2
    assert not report.certified

# -------------------------------------------------------------------------- #

def test_coarea_bound(interface, gl, c_gl):
    table = MW_lvl.coarea_length(interface, gl, c_gl, _upper(gl))
    assert table.integral > 0.0
    assert table.integral <= table.bound
    assert table.records[0].passed

    disk = MW_lvl.coarea_length(interface, gl, c_gl, _upper(gl), region=CENTER_DISK)
    assert 0.0 < disk.integral < table.integral

def test_coarea_rejects_well(interface, gl, c_gl):
    with pytest.raises(ValueError):
        MW_lvl.coarea_length(interface, gl, c_gl, 3)

def test_select_level(interface, gl, c_gl):
    A = 0.5 * c_gl.mu0
    report = MW_lvl.select_level(interface, gl, c_gl, _upper(gl), A)
    assert 0.5 * A <= report.level <= A
    # level sets of a horizontal interface are straight lines across the square
    assert report.length == pytest.approx(1.0)
    assert report.records[0].passed

    with pytest.raises(ValueError):
        MW_lvl.select_level(interface, gl, c_gl, _upper(gl), c_gl.mu0)

# -------------------------------------------------------------------------- #

def test_region_family_near_well(constant_field, gl, c_gl):
    family = MW_lvl.region_family(constant_field, gl, c_gl, 0.5 * c_gl.mu0, 0.75, disk=CENTER_DISK)
    assert np.any(family.upsilon[_upper(gl)])
    assert not np.any(family.upsilon[1 - _upper(gl)])
    assert not np.any(family.theta)
    assert all(rec.passed for rec in family.records)

def test_radius_set_near_well(constant_field, gl, c_gl):
    rs = MW_lvl.radius_set_measure(constant_field, gl, c_gl, _upper(gl), 0.5 * c_gl.mu0, 0.75, disk=CENTER_DISK)
    assert rs.premise
    assert np.all(rs.members)
    assert rs.measure == pytest.approx(0.25)
    assert rs.records[0].passed
    assert rs.radii[0] == MW_conf.RADIUS_SET_START
    assert rs.radii[-1] == pytest.approx(0.75)

def test_radius_set_rejects(interface, gl, c_gl):
    with pytest.raises(ValueError):
        MW_lvl.radius_set_measure(interface, gl, c_gl, _upper(gl), 0.1, MW_conf.RADIUS_SET_START, disk=CENTER_DISK)
    with pytest.raises(MW_err.BoundaryConditionViolated):
        MW_lvl.radius_set_measure(interface, gl, c_gl, _upper(gl), 0.5 * c_gl.mu0, 0.75, disk=CENTER_DISK)

def test_good_circle_near_well(constant_field, gl, c_gl):
    tau, report = MW_lvl.good_circle_in_upsilon(constant_field, gl, c_gl, _upper(gl), 0.5 * c_gl.mu0, 0.8, disk=CENTER_DISK)
    assert 0.625 - 1e-12 <= tau <= 0.8
    assert report.certified
    assert all(rec.passed for rec in report.records)

    with pytest.raises(ValueError):
        MW_lvl.good_circle_in_upsilon(constant_field, gl, c_gl, _upper(gl), 0.5 * c_gl.mu0, 0.7, disk=CENTER_DISK)

# -------------------------------------------------------------------------- #

def test_level_gradient_chain(interface, gl, c_gl):
    mu_tilde, table, records = MW_lvl.level_gradient_bound(interface, gl, c_gl, 0.4)
    assert 0.5 * c_gl.mu0 <= mu_tilde <= c_gl.mu0
    assert table[mu_tilde] == min(table.values())
    assert all(rec.passed for rec in records)

def test_level_flux_nondecreasing(interface, gl, c_gl):
    kappas = np.linspace(c_gl.mu0 / 8, c_gl.mu0 / 2, 4)
    profile = MW_lvl.level_flux_profile(interface, gl, c_gl, _upper(gl), 0.9, kappas, disk=CENTER_DISK)
    assert profile.flux[0] > 0.0
    assert profile.flux[-1] > profile.flux[0]
    assert all(rec.passed for rec in profile.records)

# -------------------------------------------------------------------------- #

# ---- End of <test_levelsets.py> ----
