# ---- This is <MW_concentration.py> ----

"""
Energy measures of an epsilon family, lower densities, the concentration set,
its length, connectivity and tangent cones, and limiting Hopf measures
"""

import pathlib
from dataclasses import dataclass, field

from loguru import logger

import numpy as np

from scipy import ndimage as ndim
from scipy.signal import fftconvolve
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import minimum_spanning_tree
from scipy.spatial import cKDTree

import multiwell_lab.MW_lab_config as MW_conf
import multiwell_lab.MW_errors as MW_err
import multiwell_lab.MW_grid_field as MW_gf
import multiwell_lab.MW_functionals as MW_fun
import multiwell_lab.MW_reports as MW_rep

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

@dataclass(eq=False)
class MeasureEntry:
    """Per-node masses (node weight times density) of one family member"""
    epsilon: float
    grid: MW_gf.Grid
    density: np.ndarray
    mass: np.ndarray
    omega_re: np.ndarray
    omega_im: np.ndarray
    zeta: np.ndarray

    @property
    def total(self):
        return float(np.sum(self.mass))

@dataclass(eq=False)
class MeasureStack:
    """Energy measures ordered by decreasing epsilon"""
    entries: list
    M0: float
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def last(self):
        return self.entries[-1]

    @property
    def grid(self):
        return self.entries[-1].grid

    @property
    def floor(self):
        """Smallest admissible radius: DENSITY_FLOOR_FACTOR times max h and min eps"""
        h_max = max(e.grid.h for e in self.entries)
        eps_min = min(e.epsilon for e in self.entries)
        return MW_conf.DENSITY_FLOOR_FACTOR * max(h_max, eps_min)

@dataclass(eq=False)
class ConcentrationSet:
    grid: MW_gf.Grid
    eta0: float
    theta: np.ndarray
    nodes: np.ndarray
    labels: np.ndarray
    n_components: int
    lengths: list
    skeleton: np.ndarray
    tangent: np.ndarray
    regular: np.ndarray
    junctions: int
    M0: float
    radii: list
    records: list = field(default_factory=list)

    @property
    def c_h(self):
        return 4.0 / self.eta0

    @property
    def total_length(self):
        return float(sum(self.lengths))

    def skeleton_points(self):
        X, Y = self.grid.XY
        return np.column_stack([X[self.skeleton], Y[self.skeleton]])

@dataclass
class CoveringEstimate:
    delta: float
    count: int
    estimate: float
    bound: float
    skeleton_length: float
    records: list = field(default_factory=list)

@dataclass
class ConnectivityReport:
    n_components: int
    islands: list
    consistent: bool
    records: list = field(default_factory=list)

@dataclass
class ConeReport:
    point: tuple
    direction: np.ndarray
    radii: list
    fractions: list
    passed: bool
    records: list = field(default_factory=list)

@dataclass(eq=False)
class HopfLimit:
    grid: MW_gf.Grid
    epsilons: tuple
    nu_star: np.ndarray
    omega_star_re: np.ndarray
    omega_star_im: np.ndarray
    zeta_star: np.ndarray
    binned_last: np.ndarray
    binned_prev: np.ndarray
    indicator: float
    M0: float
    records: list = field(default_factory=list)

@dataclass
class FrameProfile:
    name: str
    s: np.ndarray
    values: np.ndarray
    deviation: float
    residuals: dict = field(default_factory=dict)
    records: list = field(default_factory=list)

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def build_measure_stack(family, p):
    """Energy measures nu_eps = e_eps dx of a family on a common domain

    Parameters
    ----------
    family : list of SolveResult or Field (failed members are skipped)
    p : Potential

    Returns
    -------
    stack : MeasureStack sorted by decreasing epsilon, M0 = largest total mass
    """

    fields = []
    for member in family:
        if getattr(member, 'failure', None) is not None:
            logger.warning(f'Skipping failed member eps={member.epsilon}: {member.failure}')
            continue
        fields.append(getattr(member, 'field', member))

    if not fields:
        logger.error('No usable member to build a measure stack')
        raise MW_err.InsufficientFamily('No usable member to build a measure stack')

    for f in fields[1:]:
        if not MW_gf.same_domain(fields[0].grid, f.grid):
            logger.error('Family members live on different domains')
            raise MW_err.GridMismatch('Family members live on different domains')

    entries = []
    for f in sorted(fields, key=lambda g: -g.epsilon):
        grad = MW_gf.gradient(f)
        density = MW_fun.energy_density(f, p, grad)
        hopf = MW_fun.hopf_differential(f, grad)
        w = MW_gf.node_weights(f.grid)
        entries.append(MeasureEntry(
            epsilon = f.epsilon,
            grid = f.grid,
            density = density.e,
            mass = w * density.e,
            omega_re = w * hopf.omega_re,
            omega_im = w * hopf.omega_im,
            zeta = w * density.v,
        ))

    M0 = max(e.total for e in entries)
    for e in entries:
        logger.debug(f'eps={e.epsilon:.4g}: total mass {e.total:.6g}')
    logger.info(f'Measure stack: {len(entries)} entries, M0 = {M0:.6g}')

    return MeasureStack(entries, float(M0))

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def density_radii(stack):
    """Dyadic radii 2^-j in [floor, DENSITY_WINDOW_TOP * diameter], decreasing (the floor alone if none fits)"""

    floor = stack.floor
    top = MW_conf.DENSITY_WINDOW_TOP * stack.grid.diameter
    radii = []
    j = 0
    while 2.0**(-j) >= floor:
        if 2.0**(-j) <= top:
            radii.append(2.0**(-j))
        j += 1

    if not radii:
        logger.debug(f'No dyadic radius in [{floor:.4g}, {top:.4g}], using the floor')
        radii = [floor]
    return radii

# -------------------------------------------------------------------------- #

def _extended_density(stack, pad):
    """Last-eps density continued outside the domain by nearest active values, padded by pad nodes"""

    key = ('extended', pad)
    if key not in stack._cache:
        grid = stack.grid
        e = MW_gf._extend_outside(grid, stack.last.density[..., None])[..., 0]
        stack._cache[key] = np.pad(e, pad, mode='edge')
    return stack._cache[key]

# -------------------------------------------------------------------------- #

def _pad_for(grid, radius):
    return int(np.ceil(radius / grid.h)) + 2

# -------------------------------------------------------------------------- #

def _disk_masses(stack, r):
    """Mass of D(x, r) for every node x of the last grid"""

    key = ('disk_masses', r)
    if key in stack._cache:
        return stack._cache[key]

    grid = stack.grid
    h = grid.h
    pad = _pad_for(grid, r)
    ext = _extended_density(stack, pad)

    n = int(np.ceil(r / h)) + 1
    offsets = h * np.arange(-n, n + 1)
    dist = np.hypot(offsets[None, :], offsets[:, None])
    kernel = np.clip((r - dist) / h + 0.5, 0.0, 1.0) * h * h

    masses = fftconvolve(ext, kernel, mode='same')[pad:-pad, pad:-pad]
    masses = np.maximum(masses, 0.0)
    stack._cache[key] = masses
    return masses

# -------------------------------------------------------------------------- #

def _disk_mass_at(stack, x0, r):
    grid = stack.grid
    h = grid.h
    pad = _pad_for(grid, r)
    ext = _extended_density(stack, pad)

    xs = grid.x[0] + h * (np.arange(ext.shape[1]) - pad)
    ys = grid.y[0] + h * (np.arange(ext.shape[0]) - pad)
    i0, i1 = np.searchsorted(xs, [x0[0] - r - h, x0[0] + r + h])
    j0, j1 = np.searchsorted(ys, [x0[1] - r - h, x0[1] + r + h])

    dist = np.hypot(xs[None, i0:i1] - x0[0], ys[j0:j1, None] - x0[1])
    w = np.clip((r - dist) / h + 0.5, 0.0, 1.0) * h * h
    return float(np.sum(w * ext[j0:j1, i0:i1]))

# -------------------------------------------------------------------------- #

def lower_density(stack, x0, radii=None):
    """Lower density estimate: min over admissible radii of last-eps disk mass / r

    Parameters
    ----------
    stack : MeasureStack
    x0 : point
    radii : radii to use (default: density_radii(stack)); radii below the floor are dropped

    Returns
    -------
    theta : estimate of the 1-dimensional lower density at x0
    """

    if radii is None:
        radii = density_radii(stack)
    floor = stack.floor
    admissible = [r for r in radii if r >= floor * (1.0 - 1e-12)]
    if not admissible:
        logger.error(f'No radius in {list(radii)} reaches the floor {floor:.4g}')
        raise ValueError(f'No radius in {list(radii)} reaches the floor {floor:.4g}')

    return float(min(_disk_mass_at(stack, x0, r) / r for r in admissible))

# -------------------------------------------------------------------------- #

def lower_density_field(stack, radii=None):
    """Lower density estimate at every node of the last grid (zero outside the domain)"""

    if radii is None:
        radii = density_radii(stack)
    theta = np.min(np.stack([_disk_masses(stack, r) / r for r in radii]), axis=0)
    theta[~stack.grid.active] = 0.0
    return theta

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def _neighbours(img):
    """P2..P9 of every interior pixel, clockwise from north (row j-1)"""
    return [
        img[:-2, 1:-1], img[:-2, 2:], img[1:-1, 2:], img[2:, 2:],
        img[2:, 1:-1], img[2:, :-2], img[1:-1, :-2], img[:-2, :-2],
    ]

def _transitions(P):
    return sum(((P[n] == 0) & (P[(n + 1) % 8] == 1)).astype(int) for n in range(8))

# -------------------------------------------------------------------------- #

def thin(mask):
    """Zhang-Suen thinning of a boolean image to a one-pixel wide 8-connected skeleton"""

    img = np.pad(np.asarray(mask, dtype=bool), 1).astype(np.uint8)

    changed = True
    while changed:
        changed = False
        for step in (0, 1):
            P = _neighbours(img)
            centre = img[1:-1, 1:-1] == 1
            B = sum(q.astype(int) for q in P)
            A = _transitions(P)
            P2, P4, P6, P8 = P[0], P[2], P[4], P[6]
            if step == 0:
                cond = (P2 * P4 * P6 == 0) & (P4 * P6 * P8 == 0)
            else:
                cond = (P2 * P4 * P8 == 0) & (P2 * P6 * P8 == 0)
            delete = centre & (B >= 2) & (B <= 6) & (A == 1) & cond
            if np.any(delete):
                img[1:-1, 1:-1][delete] = 0
                changed = True

    return img[1:-1, 1:-1].astype(bool)

# -------------------------------------------------------------------------- #

def _skeleton(grid, flags, pad):
    """Skeleton of the flag set; flags are continued across the domain boundary before thinning"""

    ext = MW_gf._extend_outside(grid, flags.astype(float)[..., None])[..., 0] > 0.5
    ext = np.pad(ext, pad, mode='edge')
    skel = thin(ext)[pad:-pad, pad:-pad]
    return skel & flags & grid.active

# -------------------------------------------------------------------------- #

def _graph_length(points, h):
    """Minimum spanning forest length over 8-neighbour links between skeleton points"""

    if len(points) < 2:
        return 0.0
    tree = cKDTree(points)
    pairs = tree.query_pairs(np.sqrt(2.0) * h * (1.0 + 1e-9), output_type='ndarray')
    if pairs.size == 0:
        return 0.0
    weights = np.linalg.norm(points[pairs[:, 0]] - points[pairs[:, 1]], axis=-1)
    graph = coo_matrix((weights, (pairs[:, 0], pairs[:, 1])), shape=(len(points), len(points)))
    return float(minimum_spanning_tree(graph.tocsr()).sum())

# -------------------------------------------------------------------------- #

def _count_junctions(skel):
    """Clusters of skeleton pixels with three or more branches"""

    img = np.pad(skel, 1).astype(np.uint8)
    P = _neighbours(img)
    branches = _transitions(P)
    junction = skel & (branches >= 3)
    _, n = ndim.label(junction, structure=EIGHT_CONNECTED)
    return int(n)

# -------------------------------------------------------------------------- #

def _tangents(grid, skel):
    """Principal direction of skeleton points around each skeleton pixel (second moment about the pixel)"""

    X, Y = grid.XY
    tangent = np.full(grid.shape + (2,), np.nan)
    regular = np.zeros(grid.shape, dtype=bool)

    jj, ii = np.nonzero(skel)
    if jj.size == 0:
        return tangent, regular

    points = np.column_stack([X[jj, ii], Y[jj, ii]])
    tree = cKDTree(points)
    radius = MW_conf.PCA_RADIUS_CELLS * grid.h
    for n, near in enumerate(tree.query_ball_point(points, radius)):
        if len(near) < 3:
            continue
        d = points[near] - points[n]
        lam, vec = np.linalg.eigh(d.T @ d)
        if lam[1] < MW_conf.PCA_ANISOTROPY * max(lam[0], 1e-300):
            continue
        e = vec[:, 1]
        if e[0] < 0 or (e[0] == 0 and e[1] < 0):
            e = -e
        tangent[jj[n], ii[n]] = e
        regular[jj[n], ii[n]] = True

    return tangent, regular

# -------------------------------------------------------------------------- #

def _disk_footprint(radius_cells):
    n = int(np.floor(radius_cells))
    off = np.arange(-n, n + 1)
    return np.hypot(off[None, :], off[:, None]) <= radius_cells

# -------------------------------------------------------------------------- #

def extract_sstar(stack, eta0):
    """Concentration set {theta >= eta0} with components, lengths, tangents and junctions

    Parameters
    ----------
    stack : MeasureStack
    eta0 : threshold (> 0)

    Returns
    -------
    cs : ConcentrationSet with length-bound and complement-openness records
    """

    logger.debug(f'eta0: {eta0}, members: {len(stack.entries)}')

    if not eta0 > 0.0:
        logger.error(f'eta0 must be positive, got {eta0}')
        raise ValueError(f'eta0 must be positive, got {eta0}')

    grid = stack.grid
    radii = density_radii(stack)
    theta = lower_density_field(stack, radii)
    flags = grid.active & (theta >= eta0)
    labels, n_components = ndim.label(flags, structure=EIGHT_CONNECTED)

    skel = _skeleton(grid, flags, _pad_for(grid, max(radii)))
    X, Y = grid.XY
    lengths = []
    for label in range(1, n_components + 1):
        sel = skel & (labels == label)
        lengths.append(_graph_length(np.column_stack([X[sel], Y[sel]]), grid.h))

    tangent, regular = _tangents(grid, skel)
    junctions = _count_junctions(skel)

    cs = ConcentrationSet(
        grid = grid,
        eta0 = float(eta0),
        theta = theta,
        nodes = flags,
        labels = labels,
        n_components = int(n_components),
        lengths = lengths,
        skeleton = skel,
        tangent = tangent,
        regular = regular,
        junctions = junctions,
        M0 = stack.M0,
        radii = radii,
    )

    cs.records.append(MW_rep.inequality_record(
        'length_bound', cs.total_length, cs.c_h * stack.M0, scale=max(cs.c_h * stack.M0, 1e-12),
        details={'c_h': cs.c_h, 'M0': stack.M0},
    ))

    # D(y, r) lies in D(x, 3r/2) for y in D(x, r/2): a light enlarged disk keeps the half disk flag-free
    r_floor = min(radii)
    premise = grid.active & ~flags & (_disk_masses(stack, 1.5 * r_floor) / r_floor < eta0)
    near_flags = ndim.binary_dilation(flags, structure=_disk_footprint(0.5 * r_floor / grid.h))
    n_premise = int(np.sum(premise))
    fraction = float(np.sum(premise & near_flags)) / n_premise if n_premise else 0.0
    cs.records.append(MW_rep.inequality_record(
        'complement_openness', fraction, 0.0, scale=1.0, details={'radius': r_floor, 'n_nodes': n_premise},
    ))

    logger.info(f'S*: {n_components} component(s), length {cs.total_length:.4g}, {junctions} junction(s)')
    return cs

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def covering_length_estimate(cs, delta):
    """Length estimate #I_delta * delta from lattice disks of radius delta/2 meeting the skeleton

    Checks #I_delta * delta <= 2 M0 / eta0 and agreement with the skeleton length within a factor 4.
    """

    grid = cs.grid
    if delta < 2.0 * grid.h:
        logger.error(f'delta={delta} is below twice the grid spacing {grid.h}')
        raise ValueError(f'delta={delta} is below twice the grid spacing {grid.h}')

    points = cs.skeleton_points()
    count = 0
    if len(points):
        xs = np.arange(grid.x[0], grid.x[-1] + delta, delta)
        ys = np.arange(grid.y[0], grid.y[-1] + delta, delta)
        centers = np.column_stack([c.ravel() for c in np.meshgrid(xs, ys)])
        dist, _ = cKDTree(points).query(centers, distance_upper_bound=0.5 * (delta + grid.h))
        count = int(np.sum(np.isfinite(dist)))

    estimate = count * delta
    bound = 2.0 * cs.M0 / cs.eta0
    length = cs.total_length

    records = [MW_rep.inequality_record('covering', estimate, bound, scale=max(bound, 1e-12), details={'delta': delta})]
    if length > 0.0 or estimate > 0.0:
        ratio = max(estimate, length) / max(min(estimate, length), 1e-300)
        records.append(MW_rep.inequality_record(
            'length_agreement', ratio, 4.0, scale=4.0, details={'skeleton': length, 'covering': estimate},
        ))

    return CoveringEstimate(delta, count, estimate, bound, length, records)

# -------------------------------------------------------------------------- #

def connectivity_check(cs, x0, r):
    """Components of (S* in the closed disk) union its rasterized circle

    A single component is expected; every other component is an island and
    comes with the annulus separating it from the circle.
    """

    grid = cs.grid
    if not MW_gf.contains_disk(grid, MW_gf.DiskSpec(tuple(x0), 2.0 * r)):
        logger.error(f'D({tuple(x0)}, {2.0 * r}) is not contained in the domain')
        raise MW_err.DiskOutsideDomain(f'D({tuple(x0)}, {2.0 * r}) is not contained in the domain')

    X, Y = grid.XY
    dist = np.hypot(X - x0[0], Y - x0[1])
    circle = np.abs(dist - r) <= MW_conf.CIRCLE_RASTER_WIDTH * grid.h
    inner = cs.nodes & (dist <= r)

    labels, n = ndim.label(circle | inner, structure=EIGHT_CONNECTED)
    on_circle = set(np.unique(labels[circle]).tolist()) - {0}

    islands = []
    for label in range(1, n + 1):
        if label in on_circle:
            continue
        island = labels == label
        r_in = float(np.max(dist[island]))
        others = inner & ~island & (dist > r_in)
        islands.append({
            'n_nodes': int(np.sum(island)),
            'r_in': r_in,
            'r_out': float(r),
            'annulus_empty': not bool(np.any(others)),
        })

    consistent = n == 1
    if not consistent:
        logger.warning(f'{n} components in S* union circle at {tuple(x0)}, r={r}')

    record = MW_rep.inequality_record(
        'connectivity', n - 1, 0, scale=1.0, region={'center': list(x0), 'radius': r},
        details={'n_components': n},
    )
    return ConnectivityReport(int(n), islands, consistent, [record])

# -------------------------------------------------------------------------- #

def tangent_cone_check(cs, x0, theta, radii=None):
    """Fraction of skeleton cells in D(x0, r) outside the cone |e_perp . d| <= theta |e . d|

    The fraction is expected non-increasing as r decreases and small at the
    smallest radius; one cell of slack absorbs rasterization.

    Parameters
    ----------
    cs : ConcentrationSet
    x0 : point on the set (snapped to the nearest skeleton cell)
    theta : cone slope
    radii : at least three radii (default: 16h, 8h, 4h)

    Returns
    -------
    report : ConeReport
    """

    grid = cs.grid
    if radii is None:
        radii = [n * grid.h for n in MW_conf.CONE_RADII_CELLS]
    radii = sorted(radii, reverse=True)
    if len(radii) < 3:
        logger.error('tangent_cone_check needs at least three radii')
        raise ValueError('tangent_cone_check needs at least three radii')

    points = cs.skeleton_points()
    if not len(points):
        logger.error('Empty concentration set, no tangent at any point')
        raise MW_err.NotRegularPoint('Empty concentration set, no tangent at any point')

    dist, nearest = cKDTree(points).query(np.asarray(x0, dtype=float))
    if dist > np.sqrt(2.0) * grid.h:
        logger.error(f'{tuple(x0)} is not on the concentration set')
        raise MW_err.NotRegularPoint(f'{tuple(x0)} is not on the concentration set')

    base = points[nearest]
    jj, ii = np.nonzero(cs.skeleton)
    j, i = jj[nearest], ii[nearest]
    if not cs.regular[j, i]:
        logger.error(f'No tangent direction at {tuple(base)}: isotropic neighbourhood')
        raise MW_err.NotRegularPoint(f'No tangent direction at {tuple(base)}: isotropic neighbourhood')

    e = cs.tangent[j, i]
    e_perp = np.array([-e[1], e[0]])
    d = points - base
    along = np.abs(d @ e)
    across = np.abs(d @ e_perp)
    norm = np.linalg.norm(d, axis=-1)
    outside = across > theta * along + MW_conf.CONE_TOLERANCE_CELLS * grid.h

    fractions = []
    for r in radii:
        sel = (norm > 0.0) & (norm <= r)
        fractions.append(float(np.mean(outside[sel])) if np.any(sel) else 0.0)

    increase = max((b - a for a, b in zip(fractions[:-1], fractions[1:])), default=0.0)
    records = [
        MW_rep.inequality_record('tangent_cone', fractions[-1], 0.0, scale=1.0,
                                 region={'center': base.tolist()}, details={'theta': theta}),
        MW_rep.inequality_record('tangent_cone', max(increase, 0.0), 0.0, scale=1.0, tolerance=1e-12,
                                 region={'center': base.tolist()}, details={'kind': 'monotone'}),
    ]
    passed = increase <= 1e-12 and fractions[-1] <= MW_conf.CONE_FINAL_FRACTION

    return ConeReport(tuple(base), e, radii, fractions, bool(passed), records)

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def clearing_transfer_check(stack, cs):
    """Fraction of sub-threshold disks (mass / r < eta0) holding a theta >= eta0/4 in their half disk

    Only disks of radius at least four times the smallest density radius are
    tested; below that theta cannot separate the half disk from the rest.
    """

    grid = stack.grid
    X, Y = grid.XY
    to_boundary = MW_gf.distance_to_boundary(grid, np.column_stack([X.ravel(), Y.ravel()])).reshape(grid.shape)
    high = cs.theta >= 0.25 * cs.eta0

    n_disks = 0
    n_bad = 0
    for r in cs.radii:
        if r < 4.0 * min(cs.radii):
            continue
        premise = grid.active & (to_boundary >= r) & (_disk_masses(stack, r) / r < cs.eta0)
        near_high = ndim.binary_dilation(high, structure=_disk_footprint(0.5 * r / grid.h))
        n_disks += int(np.sum(premise))
        n_bad += int(np.sum(premise & near_high))

    fraction = n_bad / n_disks if n_disks else 0.0
    logger.info(f'clearing transfer: {n_bad} of {n_disks} sub-threshold disks hold theta >= eta0/4')
    return MW_rep.inequality_record(
        'clearing_transfer', fraction, 0.0, scale=1.0, details={'n_disks': n_disks, 'n_bad': n_bad},
    )

# -------------------------------------------------------------------------- #

def bordurer_check(stack, cs, delta=None):
    """Components of S* away from the boundary enclosed by a (nearly) massless annulus of width delta

    Such a pocket contradicts the vanishing of the measure inside zero-mass annuli.
    An annulus counts as massless when it carries less than eta0 * delta / 4.
    """

    grid = stack.grid
    if delta is None:
        delta = min(cs.radii)

    footprint = _disk_footprint(delta / grid.h)
    pockets = []
    for label in range(1, cs.n_components + 1):
        comp = cs.labels == label
        filled = ndim.binary_fill_holes(comp)
        grown = ndim.binary_dilation(filled, structure=footprint)
        if np.any(grown & ~grid.inside):
            continue
        annulus_mass = float(np.sum(stack.last.mass[grown & ~filled]))
        if annulus_mass < 0.25 * cs.eta0 * delta:
            pockets.append({'component': label, 'annulus_mass': annulus_mass,
                            'pocket_mass': float(np.sum(stack.last.mass[filled]))})

    if pockets:
        logger.warning(f'{len(pockets)} component(s) of S* enclosed by a massless annulus')
    return MW_rep.inequality_record(
        'bordurer', len(pockets), 0, scale=1.0, details={'delta': delta, 'pockets': pockets},
    )

# -------------------------------------------------------------------------- #

def first_variation_residual(stack, cs, x0, r):
    """Exploratory tangential divergence int div_S X dnu for the five bump fields on D(x0, r)

    Every node carrying mass uses the tangent of the nearest regular skeleton cell
    within the density floor. Nothing is asserted.

    Returns
    -------
    residuals : dict test-field name -> residual / int |DX| dnu
    """

    grid = stack.grid
    jj, ii = np.nonzero(cs.regular)
    if jj.size == 0:
        logger.info('No regular cell, first variation not evaluated')
        return {}

    X, Y = grid.XY
    tree = cKDTree(np.column_stack([X[jj, ii], Y[jj, ii]]))
    carrying = stack.last.mass > 0.0
    dist, idx = tree.query(np.column_stack([X[carrying], Y[carrying]]), distance_upper_bound=stack.floor)
    found = np.isfinite(dist)

    e = np.zeros((int(np.sum(carrying)), 2))
    e[found] = cs.tangent[jj[idx[found]], ii[idx[found]]]
    mass = stack.last.mass[carrying] * found

    residuals = {}
    for test in MW_fun.bump_test_fields(grid, x0, r):
        DX = test.DX[carrying]
        div_s = np.einsum('ni,nij,nj->n', e, DX, e)
        scale = float(np.sum(mass * np.sqrt(np.sum(DX**2, axis=(-2, -1)))))
        residuals[test.name] = float(np.sum(mass * div_s)) / scale if scale > 0.0 else 0.0

    logger.info(f'first variation residuals: {residuals}')
    return residuals

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def _bin(entry, edges_x, edges_y):
    X, Y = entry.grid.XY
    channels = [entry.omega_re, entry.omega_im, entry.zeta]
    return np.stack([
        np.histogram2d(Y.ravel(), X.ravel(), bins=(edges_y, edges_x), weights=c.ravel())[0]
        for c in channels
    ])

# -------------------------------------------------------------------------- #

def limit_hopf(source, p=None):
    """Last-eps Hopf and potential measures with a two-point convergence indicator

    Parameters
    ----------
    source : MeasureStack, or a family (list of SolveResult or Field) with p
    p : Potential (needed for a family)

    Returns
    -------
    hl : HopfLimit; the indicator is sum |last - previous| / sum |last| on a
         HOPF_LATTICE_CELLS lattice over the three channels
    """

    stack = source if isinstance(source, MeasureStack) else build_measure_stack(source, p)
    if len(stack.entries) < 2:
        logger.error('Limit measures need at least two epsilon values')
        raise MW_err.InsufficientFamily('Limit measures need at least two epsilon values')

    last, prev = stack.entries[-1], stack.entries[-2]
    grid = last.grid
    edges_x = np.linspace(grid.x[0], grid.x[-1], MW_conf.HOPF_LATTICE_CELLS + 1)
    edges_y = np.linspace(grid.y[0], grid.y[-1], MW_conf.HOPF_LATTICE_CELLS + 1)
    binned_last = _bin(last, edges_x, edges_y)
    binned_prev = _bin(prev, edges_x, edges_y)

    total = float(np.sum(np.abs(binned_last)))
    indicator = float(np.sum(np.abs(binned_last - binned_prev))) / total if total > 0.0 else 0.0

    hl = HopfLimit(
        grid = grid,
        epsilons = (prev.epsilon, last.epsilon),
        nu_star = last.mass,
        omega_star_re = last.omega_re,
        omega_star_im = last.omega_im,
        zeta_star = last.zeta,
        binned_last = binned_last,
        binned_prev = binned_prev,
        indicator = indicator,
        M0 = stack.M0,
    )

    scale = max(stack.M0, 1e-12)
    hl.records.append(MW_rep.inequality_record(
        'hopf_total_variation', float(np.sum(np.hypot(last.omega_re, last.omega_im))), 2.0 * stack.M0, scale=scale,
        details={'measure': 'omega'},
    ))
    hl.records.append(MW_rep.inequality_record(
        'hopf_total_variation', float(np.sum(last.zeta)), stack.M0, scale=scale, details={'measure': 'zeta'},
    ))

    logger.info(f'Hopf limit at eps={last.epsilon:.4g}: indicator {indicator:.4g}')
    return hl

# -------------------------------------------------------------------------- #

def hopf_totals(hl):
    """Total complex mass of omega* and total mass of zeta*"""
    return complex(np.sum(hl.omega_star_re), np.sum(hl.omega_star_im)), float(np.sum(hl.zeta_star))

# -------------------------------------------------------------------------- #

def rotation_covariance_check(hl, angle):
    """Straight interface with direction angle alpha: total omega* = -2 e^{-2 i alpha} total zeta*"""

    omega, zeta = hopf_totals(hl)
    expected = -2.0 * zeta * np.exp(-2j * angle)
    return MW_rep.inequality_record(
        'hopf_rotation', abs(omega - expected), 0.0, scale=max(2.0 * zeta, 1e-12),
        details={'angle': angle, 'omega': [omega.real, omega.imag], 'zeta': zeta},
    )

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def _frame(hl, x0, r):
    """Column and row selections of Q_r = I_r x I_r and R_r = I_r x I_{3r/4}, after the frame hypothesis"""

    grid = hl.grid
    x0 = np.asarray(x0, dtype=float)
    corners = x0 + r * np.array([[-1, -1], [1, -1], [1, 1], [-1, 1]])
    if np.any(MW_gf.distance_to_boundary(grid, corners) < -MW_gf.GEOM_TOL):
        logger.error(f'Frame of half-width {r} at {tuple(x0)} is not contained in the domain')
        raise MW_err.RegionOutsideDomain(f'Frame of half-width {r} at {tuple(x0)} is not contained in the domain')

    cols = np.abs(grid.x - x0[0]) < r
    rows_q = np.abs(grid.y - x0[1]) <= r
    rows_r = np.abs(grid.y - x0[1]) <= 0.75 * r

    Q = rows_q[:, None] & cols[None, :]
    R = rows_r[:, None] & cols[None, :]
    mass_q = float(np.sum(hl.nu_star[Q]))
    mass_frame = float(np.sum(hl.nu_star[Q & ~R]))
    if mass_frame > MW_conf.FRAME_MASS_TOL * mass_q:
        logger.error(f'Mass {mass_frame:.4g} in Q_r \\ R_r exceeds {MW_conf.FRAME_MASS_TOL} of {mass_q:.4g}')
        raise MW_err.HypothesisNotMet(f'Mass {mass_frame:.4g} in Q_r \\ R_r exceeds {MW_conf.FRAME_MASS_TOL} of {mass_q:.4g}')

    return cols, rows_r, R

# -------------------------------------------------------------------------- #

def _limit_stress_residuals(hl, x0, r):
    """Weak stress identity for the limit measures against the five bump fields"""

    A11 = hl.zeta_star - 0.5 * hl.omega_star_re
    A22 = hl.zeta_star + 0.5 * hl.omega_star_re
    A12 = 0.5 * hl.omega_star_im

    residuals = {}
    records = []
    for test in MW_fun.bump_test_fields(hl.grid, x0, r):
        DX = test.DX
        value = float(np.sum(
            A11 * DX[..., 0, 0] + A12 * (DX[..., 0, 1] + DX[..., 1, 0]) + A22 * DX[..., 1, 1]
        ))
        scale = float(np.sum(hl.nu_star * np.sqrt(np.sum(DX**2, axis=(-2, -1)))))
        residuals[test.name] = value
        records.append(MW_rep.inequality_record(
            'limit_stress_identity', abs(value), 0.0, scale=max(scale, 1e-12), details={'field': test.name},
        ))
    return residuals, records

# -------------------------------------------------------------------------- #

def _constancy(name, values, scale):
    deviation = float(np.max(values) - np.min(values)) / scale if scale > 0.0 and values.size else 0.0
    record = MW_rep.inequality_record(name, deviation, 0.0, scale=1.0)
    return deviation, record

# -------------------------------------------------------------------------- #

def shear_constancy_check(hl, x0, r):
    """J(s) = int Im omega* dx2 over {s} x I_{3r/4}, expected constant in s across I_r

    The deviation max |J(s) - J(s')| is relative to the total variation of omega*
    on R_r per unit width. The limit weak stress identity is reported for the five bump fields.

    Raises
    ------
    HypothesisNotMet : too much mass in the frame Q_r \\ R_r
    """

    cols, rows, R = _frame(hl, x0, r)
    h = hl.grid.h

    s = hl.grid.x[cols]
    J = np.sum(hl.omega_star_im[rows][:, cols], axis=0) / h
    tv = float(np.sum(np.hypot(hl.omega_star_re, hl.omega_star_im)[R])) / (2.0 * r)

    deviation, record = _constancy('shear_constancy', J, tv)
    residuals, records = _limit_stress_residuals(hl, x0, r)

    return FrameProfile('J', s, J, deviation, residuals, [record] + records)

# -------------------------------------------------------------------------- #

def dilation_constancy_check(hl, x0, r):
    """L(s) = int (Re omega* - 2 zeta*) dx2 over {s} x I_{3r/4}, expected constant in s across I_r

    Also reports the stretching identity
    int_R [f (Re omega* + 2 zeta*) + f' (x2 - x0_2) Im omega*] = 0
    for the bump f(x1) on I_r, relative to the same total variation.
    """

    cols, rows, R = _frame(hl, x0, r)
    grid = hl.grid
    h = grid.h

    combo = hl.omega_star_re - 2.0 * hl.zeta_star
    s = grid.x[cols]
    L = np.sum(combo[rows][:, cols], axis=0) / h
    tv_mass = float(np.sum((np.abs(hl.omega_star_re) + 2.0 * hl.zeta_star)[R]))

    deviation, record = _constancy('dilation_constancy', L, tv_mass / (2.0 * r))

    X, Y = grid.XY
    t = (X - x0[0]) / r
    inside = np.abs(t) < 1.0
    f = np.zeros(grid.shape)
    df = np.zeros(grid.shape)
    f[inside] = np.exp(-1.0 / (1.0 - t[inside]**2))
    df[inside] = f[inside] * (-2.0 * t[inside] / (1.0 - t[inside]**2)**2) / r

    integrand = f * (hl.omega_star_re + 2.0 * hl.zeta_star) + df * (Y - x0[1]) * hl.omega_star_im
    stretch = float(np.sum(integrand[R]))
    stretch_scale = float(np.sum(((np.abs(f) + np.abs(df * (Y - x0[1]))) * (np.abs(hl.omega_star_re) + 2.0 * hl.zeta_star + np.abs(hl.omega_star_im)))[R]))

    stretch_record = MW_rep.inequality_record(
        'dilation_constancy', abs(stretch), 0.0, scale=max(stretch_scale, 1e-12), details={'kind': 'stretching'},
    )
    return FrameProfile('L', s, L, deviation, {'stretching': stretch}, [record, stretch_record])

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def export_concentration(cs, out_dir, overwrite=False):
    """Write sstar_cells.csv (x, y, theta, component) and sstar_summary.json

    Returns
    -------
    paths : (csv path, json path) or None if the files exist and overwrite is False
    """

    out_dir = pathlib.Path(out_dir)
    csv_path = out_dir / 'sstar_cells.csv'
    json_path = out_dir / 'sstar_summary.json'

    if (csv_path.is_file() or json_path.is_file()) and not overwrite:
        logger.info('Output file already exists, use `--overwrite` to force')
        return None

    out_dir.mkdir(parents=True, exist_ok=True)
    X, Y = cs.grid.XY
    sel = cs.nodes
    table = np.column_stack([X[sel], Y[sel], cs.theta[sel], cs.labels[sel]])
    np.savetxt(csv_path, table, delimiter=',', header='x,y,theta,component', comments='', fmt='%.17g')

    summary = {
        'eta0': cs.eta0,
        'M0': cs.M0,
        'c_h': cs.c_h,
        'radii': cs.radii,
        'n_components': cs.n_components,
        'lengths': cs.lengths,
        'total_length': cs.total_length,
        'length_bound': cs.c_h * cs.M0,
        'junctions': cs.junctions,
        'passed': MW_rep.all_passed(cs.records),
        'records': cs.records,
    }
    MW_rep.write_json(json_path, summary)

    logger.info(f'Exported concentration set to {out_dir}')
    return csv_path, json_path

# -------------------------------------------------------------------------- #

def export_hopf_table(shear, dilation, path, overwrite=False):
    """Write the CSV table s, J(s), L(s) of one frame"""

    path = pathlib.Path(path)
    if path.is_file() and not overwrite:
        logger.info('Output file already exists, use `--overwrite` to force')
        return None

    if not np.allclose(shear.s, dilation.s):
        logger.error('Shear and dilation profiles come from different frames')
        raise ValueError('Shear and dilation profiles come from different frames')

    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.column_stack([shear.s, shear.values, dilation.values]),
               delimiter=',', header='s,J,L', comments='', fmt='%.17g')
    return path

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

# ---- End of <MW_concentration.py> ----
