# ---- This is <MW_grid_field.py> ----

"""
Uniform grids on rectangles and disks, gridded vector fields and discrete operators
"""

from dataclasses import dataclass, field, replace

from loguru import logger

import numpy as np

from scipy import ndimage as ndim
from scipy import sparse
from scipy.interpolate import RegularGridInterpolator

import multiwell_lab.MW_lab_config as MW_conf
import multiwell_lab.MW_errors as MW_err

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

# node flags
OUTSIDE  = 0
BOUNDARY = 1
INSIDE   = 2

BOUNDARY_CONDITIONS = ['dirichlet', 'neumann']

# geometric slack for containment tests
GEOM_TOL = 1e-9

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

@dataclass(frozen=True)
class DiskSpec:
    center: tuple
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f'disk radius must be positive, got {self.radius}')
        object.__setattr__(self, 'center', tuple(float(c) for c in self.center))
        object.__setattr__(self, 'radius', float(self.radius))

# -------------------------------------------------------------------------- #

@dataclass(eq=False)
class Grid:
    """Uniform node grid with spacing h; nodes are indexed [j, i] at (x0 + i h, y0 + j h)"""
    origin: np.ndarray
    h: float
    nx: int
    ny: int
    mask: np.ndarray
    shape_spec: dict
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def x(self):
        return self.origin[0] + self.h * np.arange(self.nx + 1)

    @property
    def y(self):
        return self.origin[1] + self.h * np.arange(self.ny + 1)

    @property
    def XY(self):
        if 'XY' not in self._cache:
            X, Y = np.meshgrid(self.x, self.y)
            self._cache['XY'] = (X, Y)
        return self._cache['XY']

    @property
    def shape(self):
        return (self.ny + 1, self.nx + 1)

    @property
    def active(self):
        return self.mask != OUTSIDE

    @property
    def inside(self):
        return self.mask == INSIDE

    @property
    def diameter(self):
        if self.shape_spec['shape'] == 'disk':
            return 2.0 * self.shape_spec['radius']
        x0, x1, y0, y1 = self.shape_spec['bounds']
        return float(np.hypot(x1 - x0, y1 - y0))

    @property
    def center(self):
        if self.shape_spec['shape'] == 'disk':
            return np.asarray(self.shape_spec['center'], dtype=float)
        x0, x1, y0, y1 = self.shape_spec['bounds']
        return np.array([0.5 * (x0 + x1), 0.5 * (y0 + y1)])

    def header(self):
        return {
            'origin': [float(o) for o in self.origin],
            'h': float(self.h),
            'nx': int(self.nx),
            'ny': int(self.ny),
            'shape_spec': self.shape_spec,
        }

# -------------------------------------------------------------------------- #

@dataclass(eq=False)
class Field:
    """Gridded map u: Omega -> R^k with the parameter epsilon attached"""
    grid: Grid
    values: np.ndarray
    epsilon: float
    bc: str = 'dirichlet'

    @property
    def k(self):
        return self.values.shape[-1]

    def with_values(self, values):
        return replace(self, values=_extend_outside(self.grid, np.asarray(values, dtype=float)))

# -------------------------------------------------------------------------- #

@dataclass
class CircleSamples:
    center: tuple
    radius: float
    epsilon: float
    theta: np.ndarray
    points: np.ndarray
    values: np.ndarray
    d_tau: np.ndarray
    d_r: np.ndarray
    weight: float

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def _boundary_layer(in_domain):
    """Flag in-domain nodes with an out-of-domain 4-neighbour or on the grid edge"""

    padded = np.pad(in_domain, 1, constant_values=False)
    all_neighbours = (
        padded[:-2, 1:-1] & padded[2:, 1:-1] & padded[1:-1, :-2] & padded[1:-1, 2:]
    )
    mask = np.full(in_domain.shape, OUTSIDE, dtype=np.uint8)
    mask[in_domain] = BOUNDARY
    mask[in_domain & all_neighbours] = INSIDE
    return mask

# -------------------------------------------------------------------------- #

def rectangle_grid(bounds, h):
    """Grid on the rectangle [x0,x1] x [y0,y1] with spacing close to h

    Parameters
    ----------
    bounds : (x0, x1, y0, y1)
    h : requested grid spacing

    Returns
    -------
    grid : Grid whose spacing divides both side lengths
    """

    x0, x1, y0, y1 = [float(b) for b in bounds]
    if not (x1 > x0 and y1 > y0 and h > 0):
        logger.error(f'Invalid rectangle {bounds} or spacing {h}')
        raise ValueError(f'Invalid rectangle {bounds} or spacing {h}')

    nx = max(int(round((x1 - x0) / h)), 1)
    h_eff = (x1 - x0) / nx
    ny = int(round((y1 - y0) / h_eff))

    if abs(ny * h_eff - (y1 - y0)) > 1e-6 * h_eff:
        logger.error(f'Rectangle {bounds} is not commensurate with spacing {h_eff}')
        raise ValueError(f'Rectangle {bounds} is not commensurate with spacing {h_eff}')

    if nx < MW_conf.MIN_CELLS or ny < MW_conf.MIN_CELLS:
        logger.error(f'Grid needs at least {MW_conf.MIN_CELLS} cells per side, got {nx}x{ny}')
        raise ValueError(f'Grid needs at least {MW_conf.MIN_CELLS} cells per side, got {nx}x{ny}')

    in_domain = np.ones((ny + 1, nx + 1), dtype=bool)
    return Grid(
        origin = np.array([x0, y0]),
        h = h_eff,
        nx = nx,
        ny = ny,
        mask = _boundary_layer(in_domain),
        shape_spec = {'shape': 'rectangle', 'bounds': [x0, x1, y0, y1]},
    )

# -------------------------------------------------------------------------- #

def disk_grid(center, radius, h):
    """Grid covering the closed disk D(center, radius) with two cells of margin"""

    cx, cy = [float(c) for c in center]
    if not (radius > 0 and h > 0):
        logger.error(f'Invalid disk radius {radius} or spacing {h}')
        raise ValueError(f'Invalid disk radius {radius} or spacing {h}')

    n = int(np.ceil(2.0 * (radius + 2.0 * h) / h))
    if n < MW_conf.MIN_CELLS:
        logger.error(f'Grid needs at least {MW_conf.MIN_CELLS} cells per side, got {n}')
        raise ValueError(f'Grid needs at least {MW_conf.MIN_CELLS} cells per side, got {n}')

    origin = np.array([cx, cy]) - 0.5 * n * h
    x = origin[0] + h * np.arange(n + 1)
    y = origin[1] + h * np.arange(n + 1)
    X, Y = np.meshgrid(x, y)
    in_domain = np.hypot(X - cx, Y - cy) <= radius * (1.0 + 1e-12)

    return Grid(
        origin = origin,
        h = float(h),
        nx = n,
        ny = n,
        mask = _boundary_layer(in_domain),
        shape_spec = {'shape': 'disk', 'center': [cx, cy], 'radius': float(radius)},
    )

# -------------------------------------------------------------------------- #

def grid_from_spec(shape_spec, h):
    """Rebuild a grid from its shape spec and spacing"""

    if shape_spec['shape'] == 'rectangle':
        return rectangle_grid(shape_spec['bounds'], h)
    if shape_spec['shape'] == 'disk':
        return disk_grid(shape_spec['center'], shape_spec['radius'], h)

    logger.error(f'{shape_spec["shape"]} is not a valid domain shape')
    raise ValueError(f'{shape_spec["shape"]} is not a valid domain shape')

# -------------------------------------------------------------------------- #

def same_domain(grid_a, grid_b):
    """True when two grids discretize the same domain geometry"""

    a = grid_a.shape_spec
    b = grid_b.shape_spec
    if a['shape'] != b['shape']:
        return False
    if a['shape'] == 'rectangle':
        return np.allclose(a['bounds'], b['bounds'])
    return np.allclose(a['center'], b['center']) and np.isclose(a['radius'], b['radius'])

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def distance_to_boundary(grid, points):
    """Signed distance from points to the domain boundary (positive inside)"""

    points = np.atleast_2d(np.asarray(points, dtype=float))
    spec = grid.shape_spec
    if spec['shape'] == 'rectangle':
        x0, x1, y0, y1 = spec['bounds']
        return np.min(np.stack([
            points[:, 0] - x0, x1 - points[:, 0], points[:, 1] - y0, y1 - points[:, 1]
        ]), axis=0)
    return spec['radius'] - np.hypot(points[:, 0] - spec['center'][0], points[:, 1] - spec['center'][1])

def contains_disk(grid, d):
    return bool(distance_to_boundary(grid, [d.center])[0] >= d.radius - GEOM_TOL)

# -------------------------------------------------------------------------- #

def _extend_outside(grid, values):
    """Copy nearest active values onto outside nodes so no operator sees undefined data"""

    if values.ndim == 2:
        values = values[..., None]
    if np.all(grid.active):
        return values
    _, (jj, ii) = ndim.distance_transform_edt(~grid.active, return_indices=True)
    return values[jj, ii]

# -------------------------------------------------------------------------- #

def make_field(grid, values, epsilon, bc='dirichlet'):
    """Create a Field from an array of node values or a callable f(X, Y)

    Parameters
    ----------
    grid : Grid
    values : array (ny+1, nx+1[, k]) or callable returning such an array
    epsilon : the parameter epsilon > 0
    bc : 'dirichlet' or 'neumann' (default='dirichlet')

    Returns
    -------
    f : Field

    Examples
    --------
    f = make_field(grid, lambda X, Y: np.tanh((Y - 0.5) / (np.sqrt(2) * eps)), eps)
    """

    if not epsilon > 0:
        logger.error(f'epsilon must be positive, got {epsilon}')
        raise ValueError(f'epsilon must be positive, got {epsilon}')

    if bc not in BOUNDARY_CONDITIONS:
        logger.error(f'{bc} is not a valid choice for bc')
        raise ValueError(f'{bc} is not a valid choice for bc')

    if callable(values):
        X, Y = grid.XY
        values = values(X, Y)

    values = np.asarray(values, dtype=float)
    if values.ndim == 2:
        values = values[..., None]

    if values.shape[:2] != grid.shape:
        logger.error(f'values shape {values.shape} does not match grid {grid.shape}')
        raise ValueError(f'values shape {values.shape} does not match grid {grid.shape}')

    if not np.all(np.isfinite(values[grid.active])):
        logger.error('Field values must be finite on inside and boundary nodes')
        raise ValueError('Field values must be finite on inside and boundary nodes')

    return Field(grid, _extend_outside(grid, values), float(epsilon), bc)

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def node_weights(grid):
    """Quadrature weights: area of each node's dual cell inside the domain"""

    if 'node_weights' in grid._cache:
        return grid._cache['node_weights']

    h = grid.h
    if grid.shape_spec['shape'] == 'rectangle':
        wx = np.full(grid.nx + 1, h)
        wx[[0, -1]] = 0.5 * h
        wy = np.full(grid.ny + 1, h)
        wy[[0, -1]] = 0.5 * h
        w = wy[:, None] * wx[None, :]
    else:
        spec = grid.shape_spec
        w = h * h * _disk_coverage(
            grid, spec['center'], spec['radius'], MW_conf.COVERAGE_SUBSAMPLES_FINE
        )
        w[~grid.active] = 0.0

    grid._cache['node_weights'] = w
    return w

# -------------------------------------------------------------------------- #

def _disk_coverage(grid, center, radius, subsamples):
    """Fraction of each node's dual cell covered by the disk, by sub-sampling"""

    h = grid.h
    cx, cy = center
    cover = np.zeros(grid.shape)

    # window of nodes whose dual cell can meet the disk
    i0 = max(int(np.floor((cx - radius - grid.origin[0]) / h)) - 1, 0)
    i1 = min(int(np.ceil((cx + radius - grid.origin[0]) / h)) + 1, grid.nx)
    j0 = max(int(np.floor((cy - radius - grid.origin[1]) / h)) - 1, 0)
    j1 = min(int(np.ceil((cy + radius - grid.origin[1]) / h)) + 1, grid.ny)
    if i1 < i0 or j1 < j0:
        return cover

    xs = grid.origin[0] + h * np.arange(i0, i1 + 1)
    ys = grid.origin[1] + h * np.arange(j0, j1 + 1)
    offsets = ((np.arange(subsamples) + 0.5) / subsamples - 0.5) * h

    X = xs[None, :, None, None] + offsets[None, None, None, :]
    Y = ys[:, None, None, None] + offsets[None, None, :, None]
    inside = (X - cx)**2 + (Y - cy)**2 <= radius**2
    cover[j0:j1 + 1, i0:i1 + 1] = inside.mean(axis=(2, 3))
    return cover

# -------------------------------------------------------------------------- #

def region_weights(grid, region, clip=False, subsamples=MW_conf.COVERAGE_SUBSAMPLES):
    """Quadrature weights restricted to a region

    Parameters
    ----------
    grid : Grid
    region : DiskSpec, annulus dict {'center', 'r_in', 'r_out'} or boolean node mask
    clip : restrict silently to the domain instead of raising (default=False)
    subsamples : sub-samples per axis for partially covered cells (default=2)

    Returns
    -------
    w : weights array with the grid shape
    """

    base = node_weights(grid)

    if isinstance(region, np.ndarray):
        if region.shape != grid.shape:
            logger.error(f'region mask shape {region.shape} does not match grid {grid.shape}')
            raise ValueError(f'region mask shape {region.shape} does not match grid {grid.shape}')
        if not clip and np.any(region & ~grid.active):
            logger.error('Region mask contains nodes outside the domain')
            raise MW_err.RegionOutsideDomain('Region mask contains nodes outside the domain')
        return base * region

    if isinstance(region, DiskSpec):
        if not clip and not contains_disk(grid, region):
            logger.error(f'Region {region} is not contained in the domain')
            raise MW_err.RegionOutsideDomain(f'Region {region} is not contained in the domain')
        return base * _disk_coverage(grid, region.center, region.radius, subsamples)

    if isinstance(region, dict):
        outer = DiskSpec(region['center'], region['r_out'])
        if not clip and not contains_disk(grid, outer):
            logger.error(f'Annulus {region} is not contained in the domain')
            raise MW_err.RegionOutsideDomain(f'Annulus {region} is not contained in the domain')
        cover = _disk_coverage(grid, outer.center, outer.radius, subsamples)
        if region['r_in'] > 0:
            cover = cover - _disk_coverage(grid, outer.center, region['r_in'], subsamples)
        return base * cover

    logger.error(f'Unsupported region type {type(region)}')
    raise TypeError(f'Unsupported region type {type(region)}')

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def laplacian_matrix(grid, bc='dirichlet'):
    """Sparse 5-point Laplacian on all nodes

    Rows exist for inside nodes (dirichlet) or inside and boundary nodes
    (neumann); all other rows are empty. The matrix is symmetric on the active rows.

    Neumann rows drop the links to missing neighbours. This is the
    zero-flux stencil of the edge energy sum (u_j - u_i)^2 / 2: the normal
    derivative vanishes to first order only, and a boundary row carries the
    one-sided flux sum, not the pointwise Laplacian (half of it on a flat side).
    """

    key = f'laplacian_{bc}'
    if key in grid._cache:
        return grid._cache[key]

    ny1, nx1 = grid.shape
    N = ny1 * nx1
    idx = np.arange(N).reshape(grid.shape)
    inv_h2 = 1.0 / grid.h**2

    rows_mask = grid.inside if bc == 'dirichlet' else grid.active
    active = grid.active

    rows = []
    cols = []
    vals = []
    diag = np.zeros(grid.shape)

    for dj, di in [(0, 1), (0, -1), (1, 0), (-1, 0)]:
        dst_active = np.zeros(grid.shape, dtype=bool)
        js = slice(max(-dj, 0), ny1 - max(dj, 0))
        is_ = slice(max(-di, 0), nx1 - max(di, 0))
        jt = slice(max(dj, 0), ny1 - max(-dj, 0))
        it = slice(max(di, 0), nx1 - max(-di, 0))
        dst_active[js, is_] = active[jt, it]
        src = rows_mask & dst_active
        rows.append(idx[src])
        neighbour = np.zeros(grid.shape, dtype=np.int64)
        neighbour[js, is_] = idx[jt, it]
        cols.append(neighbour[src])
        vals.append(np.full(int(src.sum()), inv_h2))
        diag[src] -= inv_h2

    rows.append(idx[rows_mask])
    cols.append(idx[rows_mask])
    vals.append(diag[rows_mask])

    L = sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(N, N)
    ).tocsr()

    grid._cache[key] = L
    return L

# -------------------------------------------------------------------------- #

def laplacian(f):
    """5-point Laplacian of a field; zero on pinned (dirichlet) boundary and outside nodes"""

    L = laplacian_matrix(f.grid, f.bc)
    flat = f.values.reshape(-1, f.k)
    return np.asarray(L @ flat).reshape(f.values.shape)

# -------------------------------------------------------------------------- #

def gradient(f):
    """Per-node gradient of shape (ny+1, nx+1, 2, k)

    Central differences where both neighbours are active, one-sided
    differences at the boundary layer, zero at outside nodes.
    """

    h = f.grid.h
    u = f.values
    active = np.pad(f.grid.active, 1, constant_values=False)
    padded = np.pad(u, ((1, 1), (1, 1), (0, 0)), mode='edge')

    def axis_derivative(prev_sl, next_sl):
        has_prev = active[prev_sl][..., None]
        has_next = active[next_sl][..., None]
        prev = padded[prev_sl]
        nxt = padded[next_sl]
        return np.where(
            has_prev & has_next,
            (nxt - prev) / (2.0 * h),
            np.where(has_next, (nxt - u) / h, np.where(has_prev, (u - prev) / h, 0.0)),
        )

    dx = axis_derivative((slice(1, -1), slice(0, -2)), (slice(1, -1), slice(2, None)))
    dy = axis_derivative((slice(0, -2), slice(1, -1)), (slice(2, None), slice(1, -1)))

    grad = np.stack([dx, dy], axis=-2)
    grad[~f.grid.active] = 0.0
    return grad

# -------------------------------------------------------------------------- #

def edge_differences(f):
    """Forward differences on grid links between active nodes

    Returns
    -------
    dx : array (ny+1, nx, k), (u[j, i+1] - u[j, i]) / h on active links, else 0
    dy : array (ny, nx+1, k), (u[j+1, i] - u[j, i]) / h on active links, else 0
    """

    h = f.grid.h
    u = f.values
    active = f.grid.active
    link_x = (active[:, 1:] & active[:, :-1])[..., None]
    link_y = (active[1:, :] & active[:-1, :])[..., None]
    dx = np.where(link_x, (u[:, 1:] - u[:, :-1]) / h, 0.0)
    dy = np.where(link_y, (u[1:, :] - u[:-1, :]) / h, 0.0)
    return dx, dy

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def interpolable(grid, points):
    """True for points whose four bilinear corners are active nodes"""

    points = np.atleast_2d(np.asarray(points, dtype=float))
    s = (points - grid.origin) / grid.h
    ok = (s[:, 0] >= -GEOM_TOL) & (s[:, 0] <= grid.nx + GEOM_TOL) \
        & (s[:, 1] >= -GEOM_TOL) & (s[:, 1] <= grid.ny + GEOM_TOL)
    i0 = np.clip(np.floor(s[:, 0]).astype(int), 0, grid.nx - 1)
    j0 = np.clip(np.floor(s[:, 1]).astype(int), 0, grid.ny - 1)
    active = grid.active
    corners = active[j0, i0] & active[j0, i0 + 1] & active[j0 + 1, i0] & active[j0 + 1, i0 + 1]
    return ok & corners

# -------------------------------------------------------------------------- #

def interpolate(grid, node_array, points):
    """Bilinear interpolation of a node array with arbitrary trailing dimensions"""

    points = np.atleast_2d(np.asarray(points, dtype=float))
    points = np.column_stack([
        np.clip(points[:, 1], grid.y[0], grid.y[-1]),
        np.clip(points[:, 0], grid.x[0], grid.x[-1]),
    ])
    interp = RegularGridInterpolator((grid.y, grid.x), node_array, method='linear')
    return interp(points)

# -------------------------------------------------------------------------- #

def rescale_to_unit(f, d):
    """Rescaled field u~(x) = u(r x + x0) on the unit disk with epsilon~ = epsilon / r

    Parameters
    ----------
    f : Field
    d : DiskSpec contained in the domain

    Returns
    -------
    f_unit : Field on the unit disk grid with spacing h / r and dirichlet trace
    """

    grid = f.grid
    if not contains_disk(grid, d):
        logger.error(f'Disk {d} is not contained in the domain')
        raise MW_err.DiskOutsideDomain(f'Disk {d} is not contained in the domain')

    unit = disk_grid((0.0, 0.0), 1.0, grid.h / d.radius)
    X, Y = unit.XY
    pts = np.column_stack([
        d.center[0] + d.radius * X[unit.active],
        d.center[1] + d.radius * Y[unit.active],
    ])

    if not np.all(interpolable(grid, pts)):
        logger.error(f'Disk {d} reaches outside the active nodes')
        raise MW_err.DiskOutsideDomain(f'Disk {d} reaches outside the active nodes')

    values = np.zeros(unit.shape + (f.k,))
    values[unit.active] = interpolate(grid, f.values, pts)

    logger.debug(f'rescaled to unit disk: h~={unit.h:.4g} eps~={f.epsilon / d.radius:.4g}')

    return Field(unit, _extend_outside(unit, values), f.epsilon / d.radius, 'dirichlet')

# -------------------------------------------------------------------------- #

def embed_from_unit(f_unit, d, target):
    """Inverse of rescale_to_unit: write f_unit back into target inside the disk d"""

    X, Y = target.grid.XY
    local = np.column_stack([(X.ravel() - d.center[0]) / d.radius, (Y.ravel() - d.center[1]) / d.radius])
    inside = (np.hypot(local[:, 0], local[:, 1]) <= 1.0) & interpolable(f_unit.grid, local)
    inside = inside & target.grid.active.ravel()

    values = target.values.reshape(-1, target.k).copy()
    values[inside] = interpolate(f_unit.grid, f_unit.values, local[inside])

    return Field(
        target.grid,
        _extend_outside(target.grid, values.reshape(target.values.shape)),
        f_unit.epsilon * d.radius,
        target.bc,
    )

# -------------------------------------------------------------------------- #

def circle_sample_count(radius, h):
    return max(MW_conf.CIRCLE_MIN_SAMPLES, int(np.ceil(2.0 * np.pi * radius / h)))

# -------------------------------------------------------------------------- #

def restrict_circle(f, d, n_theta=None, grad=None):
    """Sample a field and its tangential and radial derivatives on the circle of d

    Parameters
    ----------
    f : Field
    d : DiskSpec whose boundary circle lies in the domain
    n_theta : number of samples (default=max(256, ceil(2 pi r / h)))
    grad : precomputed gradient(f) (optional)

    Returns
    -------
    samples : CircleSamples
    """

    grid = f.grid
    if n_theta is None:
        n_theta = circle_sample_count(d.radius, grid.h)

    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    radial = np.column_stack([np.cos(theta), np.sin(theta)])
    tangent = np.column_stack([-np.sin(theta), np.cos(theta)])
    points = np.asarray(d.center) + d.radius * radial

    if not contains_disk(grid, d) or not np.all(interpolable(grid, points)):
        logger.error(f'Circle of {d} is not contained in the domain')
        raise MW_err.CircleOutsideDomain(f'Circle of {d} is not contained in the domain')

    if grad is None:
        grad = gradient(f)

    values = interpolate(grid, f.values, points)
    g = interpolate(grid, grad, points)

    d_tau = np.einsum('na,nak->nk', tangent, g)
    d_r = np.einsum('na,nak->nk', radial, g)

    return CircleSamples(
        center = d.center,
        radius = d.radius,
        epsilon = f.epsilon,
        theta = theta,
        points = points,
        values = values,
        d_tau = d_tau,
        d_r = d_r,
        weight = 2.0 * np.pi * d.radius / n_theta,
    )

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

# ---- End of <MW_grid_field.py> ----
