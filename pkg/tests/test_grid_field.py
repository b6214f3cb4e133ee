# ---- This is <test_grid_field.py> ----

import numpy as np
import pytest

import multiwell_lab.MW_errors as MW_err
import multiwell_lab.MW_grid_field as MW_gf

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def test_rectangle_grid_layout(square):
    assert square.nx == 32 and square.ny == 32
    assert square.shape == (33, 33)
    assert square.h == pytest.approx(1.0 / 32)
    assert np.all(square.mask[0, :] == MW_gf.BOUNDARY)
    assert np.all(square.mask[:, -1] == MW_gf.BOUNDARY)
    assert int(np.sum(square.inside)) == 31 * 31
    assert np.allclose(square.center, [0.5, 0.5])

@pytest.mark.parametrize('bounds, h', [
    ([0.0, 1.0, 0.0, 1.0], 0.25),
    ([0.0, 1.0, 0.0, 0.55], 0.1),
    ([1.0, 0.0, 0.0, 1.0], 0.1),
])
def test_rectangle_grid_rejects(bounds, h):
    with pytest.raises(ValueError):
        MW_gf.rectangle_grid(bounds, h)

def test_disk_grid_layout(unit_disk):
    X, Y = unit_disk.XY
    r = np.hypot(X, Y)
    assert np.all(unit_disk.active == (r <= 1.0 + 1e-12))
    assert not np.any(unit_disk.active[0, :])
    assert unit_disk.diameter == 2.0

def test_grid_from_spec_roundtrip(unit_disk):
    again = MW_gf.grid_from_spec(unit_disk.shape_spec, unit_disk.h)
    assert MW_gf.same_domain(unit_disk, again)
    assert np.array_equal(again.mask, unit_disk.mask)

# -------------------------------------------------------------------------- #

def test_node_weights_area(square, unit_disk):
    assert np.sum(MW_gf.node_weights(square)) == pytest.approx(1.0)
    assert np.sum(MW_gf.node_weights(unit_disk)) == pytest.approx(np.pi, rel=2e-2)

def test_region_weights_disk(square):
    d = MW_gf.DiskSpec((0.5, 0.5), 0.3)
    w = MW_gf.region_weights(square, d, subsamples=8)
    assert np.sum(w) == pytest.approx(np.pi * 0.09, rel=1e-2)

def test_region_weights_annulus(square):
    ring = {'center': (0.5, 0.5), 'r_in': 0.1, 'r_out': 0.3}
    w = MW_gf.region_weights(square, ring, subsamples=8)
    assert np.sum(w) == pytest.approx(np.pi * (0.09 - 0.01), rel=2e-2)

def test_region_outside_domain(square):
    d = MW_gf.DiskSpec((0.9, 0.5), 0.3)
    with pytest.raises(MW_err.RegionOutsideDomain):
        MW_gf.region_weights(square, d)
    assert np.sum(MW_gf.region_weights(square, d, clip=True)) > 0.0

def test_distance_to_boundary(square, unit_disk):
    assert MW_gf.distance_to_boundary(square, [[0.5, 0.5], [0.1, 0.7]]) == pytest.approx([0.5, 0.1])
    assert MW_gf.distance_to_boundary(unit_disk, [[0.0, 0.5]]) == pytest.approx([0.5])
    assert MW_gf.contains_disk(square, MW_gf.DiskSpec((0.5, 0.5), 0.5))
    assert not MW_gf.contains_disk(square, MW_gf.DiskSpec((0.5, 0.5), 0.51))

# -------------------------------------------------------------------------- #

def test_make_field_callable_and_shape(square):
    f = MW_gf.make_field(square, lambda X, Y: X + Y, 0.1)
    assert f.k == 1
    assert f.values.shape == square.shape + (1,)
    with pytest.raises(ValueError):
        MW_gf.make_field(square, np.zeros((5, 5)), 0.1)
    with pytest.raises(ValueError):
        MW_gf.make_field(square, np.zeros(square.shape), 0.0)
    with pytest.raises(ValueError):
        MW_gf.make_field(square, np.zeros(square.shape), 0.1, bc='periodic')

def test_make_field_extends_outside(unit_disk):
    f = MW_gf.make_field(unit_disk, np.where(unit_disk.active, 1.0, np.nan), 0.1)
    assert np.all(np.isfinite(f.values))
    assert np.allclose(f.values, 1.0)

def test_gradient_of_linear_field_is_exact(square, unit_disk):
    for grid in (square, unit_disk):
        f = MW_gf.make_field(grid, lambda X, Y: np.stack([2.0 * X + 3.0 * Y, -X], axis=-1), 0.1)
        g = MW_gf.gradient(f)
        active = grid.active if grid is square else grid.inside
        assert np.allclose(g[active][:, 0, 0], 2.0)
        assert np.allclose(g[active][:, 1, 0], 3.0)
        assert np.allclose(g[active][:, 0, 1], -1.0)
        assert np.allclose(g[active][:, 1, 1], 0.0)

def test_laplacian_of_quadratic(square):
    f = MW_gf.make_field(square, lambda X, Y: X**2 + Y**2, 0.1)
    lap = MW_gf.laplacian(f)[..., 0]
    assert np.allclose(lap[square.inside], 4.0)
    assert np.allclose(lap[~square.inside], 0.0)

def test_laplacian_matrix_symmetric(unit_disk):
    L = MW_gf.laplacian_matrix(unit_disk, 'neumann')
    assert abs(L - L.T).max() < 1e-9

def test_neumann_boundary_rows(square):
    h = square.h
    ones = MW_gf.make_field(square, np.ones(square.shape), 0.1, 'neumann')
    assert np.allclose(MW_gf.laplacian(ones), 0.0)

    f = MW_gf.make_field(square, lambda X, Y: np.cos(np.pi * X), 0.1, 'neumann')
    lap = MW_gf.laplacian(f)[..., 0]
    # flat side: one-sided flux sum, half the pointwise Laplacian
    assert np.allclose(lap[1:-1, 0], (np.cos(np.pi * h) - 1.0) / h**2)
    assert lap[16, 0] == pytest.approx(-0.5 * np.pi**2, rel=1e-2)
    assert np.allclose(lap[1:-1, 1], (np.cos(2.0 * np.pi * h) - 2.0 * np.cos(np.pi * h) + 1.0) / h**2)

def test_edge_differences(square):
    f = MW_gf.make_field(square, lambda X, Y: 5.0 * X, 0.1)
    dx, dy = MW_gf.edge_differences(f)
    assert np.allclose(dx, 5.0)
    assert np.allclose(dy, 0.0)

# -------------------------------------------------------------------------- #

def test_restrict_circle_linear_field(square):
    f = MW_gf.make_field(square, lambda X, Y: X, 0.1)
    d = MW_gf.DiskSpec((0.5, 0.5), 0.25)
    s = MW_gf.restrict_circle(f, d)
    assert np.allclose(s.values[:, 0], 0.5 + 0.25 * np.cos(s.theta))
    assert np.allclose(s.d_r[:, 0], np.cos(s.theta))
    assert np.allclose(s.d_tau[:, 0], -np.sin(s.theta))
    assert s.weight * s.theta.size == pytest.approx(2.0 * np.pi * 0.25)

def test_restrict_circle_outside(square):
    f = MW_gf.make_field(square, lambda X, Y: X, 0.1)
    with pytest.raises(MW_err.CircleOutsideDomain):
        MW_gf.restrict_circle(f, MW_gf.DiskSpec((0.5, 0.5), 0.6))

def test_rescale_and_embed(square):
    f = MW_gf.make_field(square, lambda X, Y: 1.0 + X - 2.0 * Y, 0.1)
    d = MW_gf.DiskSpec((0.5, 0.5), 0.25)
    fu = MW_gf.rescale_to_unit(f, d)
    assert fu.epsilon == pytest.approx(0.4)
    assert fu.grid.shape_spec == {'shape': 'disk', 'center': [0.0, 0.0], 'radius': 1.0}
    X, Y = fu.grid.XY
    expected = 1.0 + (0.5 + 0.25 * X) - 2.0 * (0.5 + 0.25 * Y)
    assert np.allclose(fu.values[fu.grid.active][:, 0], expected[fu.grid.active])

    back = MW_gf.embed_from_unit(fu, d, f)
    assert back.epsilon == pytest.approx(0.1)
    assert np.allclose(back.values, f.values)

def test_rescale_outside(square):
    f = MW_gf.make_field(square, lambda X, Y: X, 0.1)
    with pytest.raises(MW_err.DiskOutsideDomain):
        MW_gf.rescale_to_unit(f, MW_gf.DiskSpec((0.2, 0.5), 0.3))

# -------------------------------------------------------------------------- #

# ---- End of <test_grid_field.py> ----
