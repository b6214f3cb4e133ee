# ---- This is <MW_levelsets.py> ----

"""
Good circles, uniform circle bounds, level-set lengths, well neighbourhoods
and radius sets on unit-normalized disks
"""

import pathlib
from dataclasses import dataclass, field

from loguru import logger

import numpy as np

import multiwell_lab.MW_lab_config as MW_conf
import multiwell_lab.MW_errors as MW_err
import multiwell_lab.MW_grid_field as MW_gf
import multiwell_lab.MW_functionals as MW_fun
import multiwell_lab.MW_reports as MW_rep

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

# marching squares: corner bits (00, 10, 11, 01) -> pairs of crossed edges
# edges: 0 bottom (00-10), 1 right (10-11), 2 top (01-11), 3 left (00-01)
_CASES = {
    1: [(3, 0)], 2: [(0, 1)], 3: [(3, 1)], 4: [(1, 2)], 6: [(0, 2)], 7: [(3, 2)],
    8: [(2, 3)], 9: [(0, 2)], 11: [(1, 2)], 12: [(1, 3)], 13: [(0, 1)], 14: [(3, 0)],
}
_SADDLES = {
    5: {True: [(0, 1), (2, 3)], False: [(3, 0), (1, 2)]},
    10: {True: [(3, 0), (1, 2)], False: [(0, 1), (2, 3)]},
}

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

@dataclass
class CircleReport:
    radius: float
    energy: float
    j_mass: float
    v_mass: float
    sigma_main: int
    sup_dist: float
    certified: bool = False
    case: int = 0
    records: list = field(default_factory=list)

@dataclass
class LevelSetReport:
    level: float
    length: float
    n_cells: int
    bound: float
    segments: np.ndarray = None
    records: list = field(default_factory=list)

@dataclass
class CoareaTable:
    levels: np.ndarray
    lengths: np.ndarray
    integral: float
    bound: float
    records: list = field(default_factory=list)

@dataclass
class RegionFamily:
    upsilon: list
    theta: np.ndarray
    kappa: float
    rho: float
    records: list = field(default_factory=list)

@dataclass
class RadiusSet:
    measure: float
    radii: np.ndarray
    members: np.ndarray
    premise: bool
    energy: float
    energies: np.ndarray = None
    records: list = field(default_factory=list)

@dataclass
class FluxProfile:
    kappas: np.ndarray
    flux: np.ndarray
    records: list = field(default_factory=list)

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def marching_squares(values, grid, level, cell_mask=None):
    """Segments of the level set {values = level} on the grid cells

    Saddle cells are resolved by the sign of the cell average.

    Parameters
    ----------
    values : node scalar array (ny+1, nx+1)
    grid : Grid
    level : level value
    cell_mask : boolean (ny, nx) array of cells to process (default: cells with four active corners)

    Returns
    -------
    segments : array (n, 2, 2) of segment end points
    n_degenerate : number of crossed saddle cells whose average equals the level
    n_cells : number of cells crossed by the level set
    """

    v00 = values[:-1, :-1]
    v10 = values[:-1, 1:]
    v11 = values[1:, 1:]
    v01 = values[1:, :-1]

    active = grid.active
    valid = active[:-1, :-1] & active[:-1, 1:] & active[1:, 1:] & active[1:, :-1]
    if cell_mask is not None:
        valid = valid & cell_mask

    code = (
        (v00 > level).astype(int)
        | ((v10 > level).astype(int) << 1)
        | ((v11 > level).astype(int) << 2)
        | ((v01 > level).astype(int) << 3)
    )
    code[~valid] = 0

    h = grid.h
    X0 = grid.x[:-1][None, :] + np.zeros_like(v00)
    Y0 = grid.y[:-1][:, None] + np.zeros_like(v00)

    def crossing(va, vb):
        diff = vb - va
        safe = np.where(np.abs(diff) > 1e-300, diff, 1.0)
        return np.clip((level - va) / safe, 0.0, 1.0)

    def edge_point(edge, sel):
        x = X0[sel]
        y = Y0[sel]
        if edge == 0:
            return np.column_stack([x + h * crossing(v00[sel], v10[sel]), y])
        if edge == 1:
            return np.column_stack([x + h, y + h * crossing(v10[sel], v11[sel])])
        if edge == 2:
            return np.column_stack([x + h * crossing(v01[sel], v11[sel]), y + h])
        return np.column_stack([x, y + h * crossing(v00[sel], v01[sel])])

    segments = []
    for case, pairs in _CASES.items():
        sel = code == case
        if not np.any(sel):
            continue
        for a, b in pairs:
            segments.append(np.stack([edge_point(a, sel), edge_point(b, sel)], axis=1))

    average = 0.25 * (v00 + v10 + v11 + v01)
    n_degenerate = 0
    for case, options in _SADDLES.items():
        sel_case = code == case
        if not np.any(sel_case):
            continue
        n_degenerate += int(np.sum(sel_case & (np.abs(average - level) <= 1e-12 * (1.0 + abs(level)))))
        for high, pairs in options.items():
            sel = sel_case & ((average > level) == high)
            if not np.any(sel):
                continue
            for a, b in pairs:
                segments.append(np.stack([edge_point(a, sel), edge_point(b, sel)], axis=1))

    n_cells = int(np.sum((code != 0) & (code != 15)))
    if not segments:
        return np.zeros((0, 2, 2)), n_degenerate, n_cells
    return np.concatenate(segments, axis=0), n_degenerate, n_cells

# -------------------------------------------------------------------------- #

def polyline_length(segments):
    return float(np.sum(np.linalg.norm(segments[:, 1] - segments[:, 0], axis=-1))) if len(segments) else 0.0

# -------------------------------------------------------------------------- #

def line_integral(segments, grid, node_scalar):
    """Integral of a node scalar along segments (midpoint rule)"""

    if not len(segments):
        return 0.0
    mid = 0.5 * (segments[:, 0] + segments[:, 1])
    lengths = np.linalg.norm(segments[:, 1] - segments[:, 0], axis=-1)
    return float(np.sum(lengths * MW_gf.interpolate(grid, node_scalar, mid)))

# -------------------------------------------------------------------------- #

def export_polylines(segments, path, overwrite=False):
    """Write segment end points as CSV (x0, y0, x1, y1)"""

    path = pathlib.Path(path).expanduser().absolute()
    if path.is_file() and not overwrite:
        logger.info('Output file already exists, use `--overwrite` to force')
        return None

    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.asarray(segments).reshape(-1, 4), delimiter=',', header='x0,y0,x1,y1', comments='', fmt='%.17g')
    return path

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def _disk_cells(grid, center, radius):
    """Cells whose four corners lie in the closed disk"""

    X, Y = grid.XY
    inside = np.hypot(X - center[0], Y - center[1]) <= radius * (1.0 + 1e-12)
    return inside[:-1, :-1] & inside[:-1, 1:] & inside[1:, 1:] & inside[1:, :-1]

def _disk_nodes(grid, center, radius):
    X, Y = grid.XY
    return grid.active & (np.hypot(X - center[0], Y - center[1]) <= radius * (1.0 + 1e-12))

# -------------------------------------------------------------------------- #

def _unit_field(f, disk):
    """Field on the unit disk: rescaled from disk if given, else f itself"""
    if disk is None:
        return f
    return MW_gf.rescale_to_unit(f, disk)

# -------------------------------------------------------------------------- #

def _well_distance(f, p, i):
    if not 0 <= i < p.q:
        logger.error(f'well index {i} out of range for {p.q} wells')
        raise ValueError(f'well index {i} out of range for {p.q} wells')
    return np.linalg.norm(f.values - p.wells[i].location, axis=-1)

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def circle_report(samples, p, c=None):
    """Energy, J-mass, V-mass and the main well of a sampled circle

    The main well is the one nearest to the value at the point where V equals
    its circle average. With constants c, case 1 (mean V < alpha0) is certified
    when sup |u - s_main| <= C_unf sqrt(circle energy).
    """

    eps = samples.epsilon
    grad_sq = np.sum(samples.d_tau**2, axis=-1) + np.sum(samples.d_r**2, axis=-1)
    V = np.maximum(p.V(samples.values), 0.0)

    energy = float(np.sum(0.5 * eps * grad_sq + V / eps)) * samples.weight
    j_mass = float(np.sum(np.sqrt(grad_sq * V))) * samples.weight
    v_mass = float(np.sum(V / eps)) * samples.weight

    mean_V = float(np.mean(V))
    l0 = int(np.argmin(np.abs(V - mean_V)))
    sigma_main = int(np.argmin(np.linalg.norm(p.sigma - samples.values[l0], axis=-1)))
    sup_dist = float(np.max(np.linalg.norm(samples.values - p.sigma[sigma_main], axis=-1)))

    report = CircleReport(samples.radius, energy, j_mass, v_mass, sigma_main, sup_dist)

    if c is not None:
        if mean_V < c.alpha0:
            report.case = 1
            # roundoff allowance for interpolated samples
            bound = c.c_unf * np.sqrt(energy) * (1.0 + 1e-9) + 1e-14
            report.certified = bool(sup_dist <= bound)
            report.records.append(MW_rep.inequality_record(
                'circle_uniform', sup_dist, bound, scale=max(bound, sup_dist, 1e-12),
                region={'center': list(samples.center), 'radius': samples.radius},
            ))
            if not report.certified:
                logger.warning(f'uniform bound fails on circle r={samples.radius:.4g}: {sup_dist:.4g} > {bound:.4g}')
        else:
            # far from all wells on average: no unique main well, report the nearest one
            report.case = 2
            report.certified = False

    return report

# -------------------------------------------------------------------------- #

def circle_uniform_bound(samples, p, c):
    """CircleReport of sampled circle with the certified uniform bound (requires r >= eps)"""

    if samples.radius < samples.epsilon:
        logger.error(f'circle radius {samples.radius} below epsilon {samples.epsilon}')
        raise ValueError(f'circle radius {samples.radius} below epsilon {samples.epsilon}')
    return circle_report(samples, p, c)

# -------------------------------------------------------------------------- #

def good_radius(f, p, r0, r1, x0=None, c=None):
    """Radius in [r0, r1] whose circle carries the least energy

    Parameters
    ----------
    f : Field
    p : Potential
    r0, r1 : radius window with eps <= r0 < r1
    x0 : center (default=domain center)
    c : StructuralConstants for the uniform bound (optional)

    Returns
    -------
    r : selected radius
    report : CircleReport carrying the mean-value check record
    """

    if x0 is None:
        x0 = f.grid.center
    if not (f.epsilon <= r0 < r1):
        logger.error(f'good_radius needs eps <= r0 < r1, got eps={f.epsilon}, r0={r0}, r1={r1}')
        raise ValueError(f'good_radius needs eps <= r0 < r1, got eps={f.epsilon}, r0={r0}, r1={r1}')

    outer = MW_gf.DiskSpec(tuple(x0), r1)
    if not MW_gf.contains_disk(f.grid, outer):
        logger.error(f'Annulus [{r0}, {r1}] around {tuple(x0)} is not contained in the domain')
        raise MW_err.AnnulusOutsideDomain(f'Annulus [{r0}, {r1}] around {tuple(x0)} is not contained in the domain')

    n_r = max(int(np.ceil((r1 - r0) / f.grid.h)), 2)
    radii = np.linspace(r0, r1, n_r)
    grad = MW_gf.gradient(f)

    best = None
    for r in radii:
        d = MW_gf.DiskSpec(tuple(x0), r)
        try:
            samples = MW_gf.restrict_circle(f, d, grad=grad)
        except MW_err.CircleOutsideDomain:
            logger.error(f'Annulus [{r0}, {r1}] reaches outside the active nodes')
            raise MW_err.AnnulusOutsideDomain(f'Annulus [{r0}, {r1}] reaches outside the active nodes')
        energy = MW_fun.circle_energy(samples, p)
        if best is None or energy < best[1]:
            best = (r, energy, samples)

    r, energy, samples = best
    report = circle_report(samples, p, c)

    E, _ = MW_fun.energy_on_region(f, p, outer, subsamples=MW_conf.COVERAGE_SUBSAMPLES_FINE)
    report.records.append(MW_rep.inequality_record(
        'good_radius', energy, E / (r1 - r0), scale=max(E / (r1 - r0), 1e-12),
        region={'center': list(x0), 'r0': r0, 'r1': r1},
    ))

    logger.debug(f'good radius {r:.4g}: circle energy {energy:.4g}, annulus mean {E / (r1 - r0):.4g}')
    return float(r), report

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def level_length_table(values, grid, levels, cell_mask=None):
    """Polyline lengths of the level sets of a node scalar at each level"""
    return np.array([polyline_length(marching_squares(values, grid, s, cell_mask)[0]) for s in levels])

# -------------------------------------------------------------------------- #

def coarea_length(f, p, c, i, region=None, n_levels=MW_conf.COAREA_LADDER_SIZE):
    """Level-set lengths of w_i^2 and the coarea bound int L ds <= 4 lambda0^-1/2 E(region)

    Parameters
    ----------
    f : Field
    p : Potential
    c : StructuralConstants
    i : well index
    region : DiskSpec, boolean node mask or None for the whole domain
    n_levels : number of levels in the midpoint ladder on (0, (3 mu0/4)^2)

    Returns
    -------
    table : CoareaTable
    """

    dist = _well_distance(f, p, i)
    w2 = MW_fun.plateau(dist, c.mu0)**2

    if region is None:
        cell_mask = None
    elif isinstance(region, MW_gf.DiskSpec):
        cell_mask = _disk_cells(f.grid, region.center, region.radius)
    else:
        node_mask = np.asarray(region, dtype=bool)
        cell_mask = node_mask[:-1, :-1] & node_mask[:-1, 1:] & node_mask[1:, 1:] & node_mask[1:, :-1]

    s_max = (0.75 * c.mu0)**2
    ds = s_max / n_levels
    levels = (np.arange(n_levels) + 0.5) * ds
    lengths = level_length_table(w2, f.grid, levels, cell_mask)
    integral = float(np.sum(lengths) * ds)

    E, _ = MW_fun.energy_on_region(f, p, region)
    bound = 4.0 / np.sqrt(c.lambda0) * E

    record = MW_rep.inequality_record('coarea', integral, bound, scale=max(bound, 1e-12), details={'well': i})
    return CoareaTable(levels, lengths, integral, bound, [record])

# -------------------------------------------------------------------------- #

def select_level(f, p, c, i, A, region=None):
    """Level A0 in [A/2, A] of w_i with short regular level set

    The bound is L(w_i^-1(A0)) <= 8 E / (sqrt(lambda0) A^2); the shortest
    non-degenerate level of the ladder is returned.

    Returns
    -------
    report : LevelSetReport
    """

    if not 0.0 < A <= 0.75 * c.mu0 * (1.0 + 1e-12):
        logger.error(f'select_level needs 0 < A <= 3 mu0/4 = {0.75 * c.mu0}, got {A}')
        raise ValueError(f'select_level needs 0 < A <= 3 mu0/4 = {0.75 * c.mu0}, got {A}')

    w = MW_fun.plateau(_well_distance(f, p, i), c.mu0)
    cell_mask = None
    if isinstance(region, MW_gf.DiskSpec):
        cell_mask = _disk_cells(f.grid, region.center, region.radius)

    E, _ = MW_fun.energy_on_region(f, p, region)
    bound = 8.0 * E / (np.sqrt(c.lambda0) * A**2)

    best = None
    for level in np.linspace(0.5 * A, A, MW_conf.LEVEL_LADDER_SIZE):
        segments, n_degenerate, n_cells = marching_squares(w, f.grid, level, cell_mask)
        if n_degenerate:
            continue
        length = polyline_length(segments)
        if best is None or length < best.length:
            best = LevelSetReport(float(level), length, n_cells, bound, segments)

    if best is None:
        logger.error(f'No regular level of w_{i} in [{0.5 * A}, {A}]')
        raise MW_err.NoRegularLevel(f'No regular level of w_{i} in [{0.5 * A}, {A}]')

    best.records.append(MW_rep.inequality_record(
        'select_level', best.length, bound, scale=max(bound, 1e-12), details={'well': i, 'level': best.level},
    ))
    return best

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def region_family(f, p, c, kappa, rho, disk=None):
    """Well neighbourhoods Upsilon_i = {|u - s_i| <= kappa} and far set Theta in D(rho)

    Parameters
    ----------
    f : Field (on the unit disk, or rescaled from disk)
    p : Potential
    c : StructuralConstants
    kappa : neighbourhood size
    rho : disk radius in unit-disk coordinates
    disk : physical DiskSpec to rescale from (optional)

    Returns
    -------
    family : RegionFamily with disjointness and covering records
    """

    fu = _unit_field(f, disk)
    in_disk = _disk_nodes(fu.grid, fu.grid.center, rho)
    dist = np.linalg.norm(fu.values[..., None, :] - p.sigma, axis=-1)

    upsilon = [in_disk & (dist[..., i] <= kappa) for i in range(p.q)]
    theta = in_disk & np.all(dist >= 0.5 * c.mu0, axis=-1)

    records = []
    if kappa < c.mu0:
        overlap = int(np.sum(np.sum(np.stack(upsilon), axis=0) > 1))
        records.append(MW_rep.inequality_record('kappacity', overlap, 0, scale=1.0, details={'kind': 'disjoint'}))

    half = [in_disk & (dist[..., i] <= 0.5 * c.mu0) for i in range(p.q)]
    uncovered = int(np.sum(in_disk & ~theta & ~np.any(np.stack(half), axis=0)))
    records.append(MW_rep.inequality_record('kappacity', uncovered, 0, scale=1.0, details={'kind': 'cover'}))

    return RegionFamily(upsilon, theta, float(kappa), float(rho), records)

# -------------------------------------------------------------------------- #

def _radius_scan(fu, p, sigma, kappa, rho):

    grid = fu.grid
    center = tuple(grid.center)
    grad = MW_gf.gradient(fu)

    outer = MW_gf.restrict_circle(fu, MW_gf.DiskSpec(center, rho), grad=grad)
    outer_dist = np.max(np.linalg.norm(outer.values - p.wells[sigma].location, axis=-1))
    if outer_dist >= kappa:
        logger.error(f'|u - s_{sigma}| reaches {outer_dist:.4g} >= kappa={kappa} on the circle of radius {rho}')
        raise MW_err.BoundaryConditionViolated(f'|u - s_{sigma}| reaches {outer_dist:.4g} >= kappa={kappa} on the circle of radius {rho}')

    n = max(int(np.ceil((rho - MW_conf.RADIUS_SET_START) / grid.h)), 1) + 1
    radii = np.linspace(MW_conf.RADIUS_SET_START, rho, n)
    members = np.zeros(n, dtype=bool)
    energies = np.zeros(n)
    for m, r in enumerate(radii):
        samples = MW_gf.restrict_circle(fu, MW_gf.DiskSpec(center, r), grad=grad)
        members[m] = np.max(np.linalg.norm(samples.values - p.wells[sigma].location, axis=-1)) <= kappa
        energies[m] = MW_fun.circle_energy(samples, p)

    return radii, members, energies

# -------------------------------------------------------------------------- #

def _indicator_measure(radii, members):
    """Trapezoid measure of the radii flagged as members"""
    if radii.size < 2:
        return 0.0
    dr = np.diff(radii)
    return float(np.sum(0.5 * dr * (members[:-1].astype(float) + members[1:].astype(float))))

# -------------------------------------------------------------------------- #

def radius_set_measure(f, p, c, sigma, kappa, rho, disk=None):
    """Measure of the set of radii r in [1/2, rho] with |u - s| <= kappa on the whole circle

    When kappa^2 >= E(D(rho)) / (32 sqrt(lambda0)) the measure is checked against rho - 9/16.

    Returns
    -------
    rs : RadiusSet
    """

    if not MW_conf.RADIUS_SET_START < rho <= 1.0:
        logger.error(f'rho must lie in ({MW_conf.RADIUS_SET_START}, 1], got {rho}')
        raise ValueError(f'rho must lie in ({MW_conf.RADIUS_SET_START}, 1], got {rho}')

    fu = _unit_field(f, disk)
    radii, members, energies = _radius_scan(fu, p, sigma, kappa, rho)
    measure = _indicator_measure(radii, members)

    E, _ = MW_fun.energy_on_region(fu, p, MW_gf.DiskSpec(tuple(fu.grid.center), rho), clip=True)
    premise = bool(kappa**2 >= E / (32.0 * np.sqrt(c.lambda0)))

    record = MW_rep.inequality_record(
        'radius_set', rho - 9.0 / 16.0, measure, scale=rho - MW_conf.RADIUS_SET_START, premise=premise,
        details={'sigma': sigma, 'kappa': kappa, 'rho': rho},
    )
    logger.debug(f'radius set measure {measure:.4g} (premise {premise})')
    return RadiusSet(measure, radii, members, premise, E, energies, [record])

# -------------------------------------------------------------------------- #

def good_circle_in_upsilon(f, p, c, sigma, kappa, rho, disk=None):
    """Radius tau in I(u, kappa) and [5/8, rho] minimizing the circle energy

    Returns
    -------
    tau : selected radius
    report : CircleReport with the check circle energy <= E(Upsilon) / (rho - 11/16)
    """

    if rho < MW_conf.GOOD_CIRCLE_MIN_RHO:
        logger.error(f'good_circle_in_upsilon needs rho >= {MW_conf.GOOD_CIRCLE_MIN_RHO}, got {rho}')
        raise ValueError(f'good_circle_in_upsilon needs rho >= {MW_conf.GOOD_CIRCLE_MIN_RHO}, got {rho}')

    fu = _unit_field(f, disk)
    rs = radius_set_measure(fu, p, c, sigma, kappa, rho)
    radii, members, energies = rs.radii, rs.members, rs.energies

    candidates = members & (radii >= MW_conf.GOOD_CIRCLE_START - 1e-12)
    if not np.any(candidates):
        logger.error(f'No radius of I(u, {kappa}) in [{MW_conf.GOOD_CIRCLE_START}, {rho}]')
        raise MW_err.EmptyRadiusSet(f'No radius of I(u, {kappa}) in [{MW_conf.GOOD_CIRCLE_START}, {rho}]')

    idx = np.flatnonzero(candidates)
    best = idx[np.argmin(energies[idx])]
    tau = float(radii[best])

    center = tuple(fu.grid.center)
    samples = MW_gf.restrict_circle(fu, MW_gf.DiskSpec(center, tau))
    report = circle_report(samples, p, c)

    upsilon = _disk_nodes(fu.grid, center, rho) & (np.linalg.norm(fu.values - p.wells[sigma].location, axis=-1) <= kappa)
    w = MW_gf.region_weights(fu.grid, MW_gf.DiskSpec(center, rho), clip=True) * upsilon
    E_upsilon = float(np.sum(w * MW_fun.energy_density(fu, p).e))
    bound = E_upsilon / (rho - 11.0 / 16.0)

    report.records.append(MW_rep.inequality_record(
        'good_circle', energies[best], bound, scale=max(bound, 1e-12), premise=rs.premise,
        details={'sigma': sigma, 'kappa': kappa, 'rho': rho, 'tau': tau},
    ))
    return tau, report

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def level_gradient_bound(f, p, c, r, x0=None):
    """Level mu~ in [mu0/2, mu0] minimizing sum_i int_{|u - s_i| = mu~} |grad u|

    The chain sum_i int |grad u| <= (2/mu0) int_Theta |grad u|^2 <= (4/(mu0 eps)) E(Theta)
    is checked, Theta being the nodes of D(x0, r) whose value avoids all B(s_i, mu0/2).

    Returns
    -------
    mu_tilde : selected level
    table : dict level -> summed line integral
    records : list of CheckRecord
    """

    grid = f.grid
    if x0 is None:
        x0 = grid.center

    grad = MW_gf.gradient(f)
    grad_norm = np.sqrt(np.sum(grad**2, axis=(-2, -1)))
    dist = np.linalg.norm(f.values[..., None, :] - p.sigma, axis=-1)

    in_disk = _disk_nodes(grid, x0, r)
    cells = _disk_cells(grid, x0, r)
    theta = in_disk & np.all(dist >= 0.5 * c.mu0, axis=-1)

    levels = np.linspace(0.5 * c.mu0, c.mu0, MW_conf.LEVEL_LADDER_SIZE)
    table = {}
    for level in levels:
        total = 0.0
        for i in range(p.q):
            segments, _, _ = marching_squares(dist[..., i], grid, level, cells)
            total += line_integral(segments, grid, grad_norm)
        table[float(level)] = total

    mu_tilde = min(table, key=table.get)

    w = MW_gf.node_weights(grid) * theta
    grad_theta = float(np.sum(w * grad_norm**2))
    E_theta = float(np.sum(w * MW_fun.energy_density(f, p, grad).e))
    middle = 2.0 / c.mu0 * grad_theta
    top = 4.0 / (c.mu0 * f.epsilon) * E_theta

    records = [
        MW_rep.inequality_record('level_gradient', table[mu_tilde], middle, scale=max(middle, 1e-12)),
        MW_rep.inequality_record('level_gradient', middle, top, scale=max(top, 1e-12), tolerance=1e-9),
    ]
    return mu_tilde, table, records

# -------------------------------------------------------------------------- #

def level_flux_profile(f, p, c, sigma, rho, kappas, disk=None):
    """Outward normal derivative of |u - s| integrated over the level {|u - s| = kappa} in D(rho)

    The flux is expected nondecreasing in kappa.

    Returns
    -------
    profile : FluxProfile
    """

    kappas = np.asarray(sorted(kappas), dtype=float)
    fu = _unit_field(f, disk)
    grid = fu.grid

    dist = _well_distance(fu, p, sigma)
    dfield = MW_gf.Field(grid, dist[..., None], fu.epsilon, fu.bc)
    normal = np.linalg.norm(MW_gf.gradient(dfield)[..., 0], axis=-1)
    cells = _disk_cells(grid, grid.center, rho)

    flux = np.array([
        line_integral(marching_squares(dist, grid, kappa, cells)[0], grid, normal) for kappa in kappas
    ])

    scale = max(float(np.max(flux, initial=0.0)), 1e-12)
    records = [
        MW_rep.inequality_record(
            'level_flux', flux[n] - flux[n + 1], 0.0, scale=scale,
            details={'sigma': sigma, 'kappa': [kappas[n], kappas[n + 1]]},
        )
        for n in range(len(kappas) - 1)
    ]
    return FluxProfile(kappas, flux, records)

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

# ---- End of <MW_levelsets.py> ----
