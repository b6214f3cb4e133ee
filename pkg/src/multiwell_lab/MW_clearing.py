# ---- This is <MW_clearing.py> ----

"""
Decay inequality, clearing-out verdicts, dyadic energy iteration and the
potential and exterior energy bounds
"""

from dataclasses import dataclass, field

from loguru import logger

import numpy as np

from scipy import ndimage as ndim

import multiwell_lab.MW_lab_config as MW_conf
import multiwell_lab.MW_errors as MW_err
import multiwell_lab.MW_grid_field as MW_gf
import multiwell_lab.MW_functionals as MW_fun
import multiwell_lab.MW_levelsets as MW_lvl
import multiwell_lab.MW_reports as MW_rep

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

@dataclass
class DecayCheck:
    lhs: float
    rhs_32: float
    rhs_lin: float
    c_min: float
    disk: MW_gf.DiskSpec = None
    records: list = field(default_factory=list)

@dataclass
class IterationTrace:
    radii: np.ndarray
    energies: np.ndarray
    A: np.ndarray
    n_eps: int
    c_dec: float
    eta1: float
    meray_premise: bool
    records: list = field(default_factory=list)

@dataclass
class ClearingVerdict:
    eta: float
    premise: bool
    ratio: float
    sigma: int
    sup_dist: float
    energy_on_58: float
    energy_on_r: float
    c_nrg_min: float
    passed: bool
    disk: MW_gf.DiskSpec = None
    records: list = field(default_factory=list)

    @property
    def vacuous(self):
        return not self.premise

@dataclass
class Eta0Scan:
    eta0: float
    n_disks: int
    n_failing: int
    table: list = field(default_factory=list)

@dataclass
class BoundReport:
    """Both sides of an energy bound lhs <= C * rhs and the minimal admissible C"""
    name: str
    lhs: float
    rhs: float
    c_min: float
    premise: bool = True
    terms: dict = field(default_factory=dict)
    records: list = field(default_factory=list)

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def _ratio(lhs, rhs):
    """Minimal C with lhs <= C rhs (0 when lhs vanishes)"""
    if lhs <= 0.0:
        return 0.0
    if rhs <= 0.0:
        return np.inf
    return float(lhs / rhs)

# -------------------------------------------------------------------------- #

def _energy(f, p, center, radius, density=None):
    return MW_fun.energy_on_region(
        f, p, MW_gf.DiskSpec(tuple(center), radius), density=density,
        subsamples=MW_conf.COVERAGE_SUBSAMPLES_FINE,
    )

# -------------------------------------------------------------------------- #

def _whole_disk(f):
    """DiskSpec of a disk-shaped domain"""

    spec = f.grid.shape_spec
    if spec['shape'] != 'disk':
        logger.error('A disk-shaped domain (or an explicit disk) is required')
        raise ValueError('A disk-shaped domain (or an explicit disk) is required')
    return MW_gf.DiskSpec(tuple(spec['center']), spec['radius'])

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def decay_check(f, p, c_dec=None, disk=None):
    """Decay inequality E(D(9r/16)) <= C_dec [r^-1/2 E(D(r))^3/2 + (eps/r) E(D(r))]

    On the unit disk this is E(D(9/16)) <= C_dec [E^3/2 + eps E]; the physical
    form on D(x0, r) gives the same minimal constant by scale invariance.

    Parameters
    ----------
    f : Field (a solution)
    p : Potential
    c_dec : stored constant to check against (optional)
    disk : DiskSpec (default: the whole disk-shaped domain)

    Returns
    -------
    check : DecayCheck with the minimal constant c_min
    """

    if disk is None:
        disk = _whole_disk(f)
    if not MW_gf.contains_disk(f.grid, disk):
        logger.error(f'Disk {disk} is not contained in the domain')
        raise MW_err.DiskOutsideDomain(f'Disk {disk} is not contained in the domain')

    r = disk.radius
    density = MW_fun.energy_density(f, p)
    E1, _ = _energy(f, p, disk.center, r, density)
    lhs, _ = _energy(f, p, disk.center, 9.0 * r / 16.0, density)

    rhs_32 = E1**1.5 / np.sqrt(r)
    rhs_lin = f.epsilon / r * E1
    check = DecayCheck(lhs, rhs_32, rhs_lin, _ratio(lhs, rhs_32 + rhs_lin), disk)

    if c_dec is not None:
        bound = c_dec * (rhs_32 + rhs_lin)
        check.records.append(MW_rep.inequality_record(
            'decay', lhs, bound, scale=max(bound, lhs, 1e-12),
            region={'center': list(disk.center), 'radius': r},
        ))

    logger.debug(f'decay: lhs={lhs:.4g} rhs32={rhs_32:.4g} rhslin={rhs_lin:.4g} C={check.c_min:.4g}')
    return check

# -------------------------------------------------------------------------- #

def fit_decay_constant(checks):
    """Empirical C_dec: largest minimal constant over a batch of decay checks"""
    finite = [c.c_min for c in checks if np.isfinite(c.c_min)]
    return float(max(finite, default=0.0))

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def clearing_out_check(f, p, c, d, eta, c_nrg=None):
    """Clearing-out verdict on a disk

    If E(D(x0, r)) / r <= eta, the well s is identified by majority over D(x0, 3r/4)
    and sup |u - s| <= mu0/2 is checked there; the energy contraction
    E(D(5r/8)) <= C_nrg (eps/r) E(D(r)) is reported (and checked when c_nrg is given).
    A failed premise gives a vacuous verdict.

    Returns
    -------
    verdict : ClearingVerdict
    """

    r = d.radius
    if f.epsilon > r:
        logger.error(f'clearing_out_check needs eps <= r, got eps={f.epsilon}, r={r}')
        raise ValueError(f'clearing_out_check needs eps <= r, got eps={f.epsilon}, r={r}')
    if not MW_gf.contains_disk(f.grid, d):
        logger.error(f'Disk {d} is not contained in the domain')
        raise MW_err.DiskOutsideDomain(f'Disk {d} is not contained in the domain')

    density = MW_fun.energy_density(f, p)
    E_r, _ = _energy(f, p, d.center, r, density)
    E_58, _ = _energy(f, p, d.center, 5.0 * r / 8.0, density)
    ratio = E_r / r
    premise = bool(ratio <= eta)

    X, Y = f.grid.XY
    inner = f.grid.active & (np.hypot(X - d.center[0], Y - d.center[1]) <= 0.75 * r)
    dist = np.linalg.norm(f.values[inner][:, None, :] - p.sigma[None, :, :], axis=-1)
    if dist.shape[0]:
        votes = np.bincount(np.argmin(dist, axis=-1), minlength=p.q)
        sigma = int(np.argmax(votes))
        sup_dist = float(np.max(dist[:, sigma]))
    else:
        sigma = 0
        sup_dist = 0.0

    c_nrg_min = _ratio(E_58, f.epsilon / r * E_r)
    region = {'center': list(d.center), 'radius': r}

    records = [MW_rep.inequality_record(
        'clearing_out', sup_dist, 0.5 * c.mu0, scale=c.mu0, premise=premise or False,
        region=region, details={'eta': eta, 'ratio': ratio, 'sigma': sigma},
    )]
    if c_nrg is not None:
        records.append(MW_rep.inequality_record(
            'clearing_out', E_58, c_nrg * f.epsilon / r * E_r, scale=max(E_r, 1e-12),
            premise=premise or False, region=region, details={'kind': 'energy contraction'},
        ))

    passed = all(rec.passed for rec in records)
    if not premise:
        logger.debug(f'clearing-out premise not met on {d}: E/r = {ratio:.4g} > {eta:.4g}')

    return ClearingVerdict(eta, premise, ratio, sigma, sup_dist, E_58, E_r, c_nrg_min, passed, d, records)

# -------------------------------------------------------------------------- #

def clearing_consistency(f, p, c, x0, radii, eta):
    """A pass at radius r should imply a pass at every smaller tested radius meeting the premise

    Returns
    -------
    record : CheckRecord counting violations
    verdicts : list of ClearingVerdict, radii in decreasing order
    """

    radii = sorted(radii, reverse=True)
    verdicts = [clearing_out_check(f, p, c, MW_gf.DiskSpec(tuple(x0), r), eta) for r in radii]

    violations = 0
    for n, v in enumerate(verdicts):
        if not (v.premise and v.passed):
            continue
        for w in verdicts[n + 1:]:
            if w.premise and not w.passed:
                violations += 1

    record = MW_rep.inequality_record(
        'clearing_out', violations, 0, scale=1.0,
        region={'center': list(x0), 'radii': radii}, details={'kind': 'consistency', 'eta': eta},
    )
    return record, verdicts

# -------------------------------------------------------------------------- #

def _disk_radii(diameter, eps, levels=MW_conf.DYADIC_LEVELS):
    """Radii diam 2^-n (n = 1..levels) with DISK_RADII_PER_OCTAVE steps per octave, plus the floor 4 eps"""

    per = MW_conf.DISK_RADII_PER_OCTAVE
    floor = MW_conf.DISK_MIN_EPS_FACTOR * eps
    radii = [diameter * 2.0**(-k / per) for k in range(per, per * levels + 1)]
    if radii[-1] <= floor < radii[0]:
        radii.append(floor)
    radii = sorted({float(r) for r in radii if r >= floor * (1.0 - 1e-12)}, reverse=True)
    return radii

# -------------------------------------------------------------------------- #

def sample_disks(grid, eps, levels=MW_conf.DYADIC_LEVELS):
    """Disks with dyadic and intermediate radii down to 4 eps, centers on a lattice of spacing r/4

    Returns
    -------
    disks : list of DiskSpec contained in the domain
    """

    disks = []
    center = grid.center
    x0, x1 = grid.x[0], grid.x[-1]
    y0, y1 = grid.y[0], grid.y[-1]

    for r in _disk_radii(grid.diameter, eps, levels):
        step = MW_conf.DISK_LATTICE_FACTOR * r
        ni = int(np.floor(max(center[0] - x0, x1 - center[0]) / step + 1e-9))
        nj = int(np.floor(max(center[1] - y0, y1 - center[1]) / step + 1e-9))
        for j in range(-nj, nj + 1):
            for i in range(-ni, ni + 1):
                d = MW_gf.DiskSpec((center[0] + i * step, center[1] + j * step), r)
                if MW_gf.contains_disk(grid, d):
                    disks.append(d)

    return disks

# -------------------------------------------------------------------------- #

def eta0_scan(family, p, c, disks=None, upper=MW_conf.ETA0_SCAN_UPPER, min_disks=MW_conf.ETA0_MIN_DISKS):
    """Empirical eta0: largest threshold below which every sampled disk passes the clearing-out test

    eta0 is the largest float below the smallest ratio E/r among failing disks (the scan
    upper bound when none fails), so enlarging the family can only decrease it.

    Parameters
    ----------
    family : list of SolveResult (failed members are skipped)
    p : Potential
    c : StructuralConstants
    disks : list of DiskSpec or None for sample_disks on each member grid
    upper : scan upper bound (default=2.0)
    min_disks : fewest disks meeting the premise at the upper bound (default=20)

    Returns
    -------
    scan : Eta0Scan
    """

    members = [r for r in family if r.failure is None]
    if not members:
        logger.error('eta0_scan needs a nonempty family of solved members')
        raise MW_err.DegenerateFamily('eta0_scan needs a nonempty family of solved members')

    table = []
    for result in members:
        f = result.field
        member_disks = disks if disks is not None else sample_disks(f.grid, f.epsilon)
        for d in member_disks:
            if d.radius < f.epsilon or not MW_gf.contains_disk(f.grid, d):
                continue
            v = clearing_out_check(f, p, c, d, upper)
            ok = v.sup_dist <= 0.5 * c.mu0
            table.append({
                'epsilon': f.epsilon,
                'center': list(d.center),
                'radius': d.radius,
                'ratio': v.ratio,
                'passed': bool(ok),
            })

    in_premise = [row for row in table if row['ratio'] <= upper]
    if not in_premise:
        logger.error('No sampled disk meets the clearing-out premise at any threshold')
        raise MW_err.DegenerateFamily('No sampled disk meets the clearing-out premise at any threshold')
    if len(in_premise) < min_disks:
        logger.error(f'Only {len(in_premise)} sampled disks meet the clearing-out premise, need {min_disks}')
        raise MW_err.DegenerateFamily(f'Only {len(in_premise)} sampled disks meet the clearing-out premise, need {min_disks}')
    if len(table) < MW_conf.ETA0_TARGET_DISKS:
        logger.warning(f'eta0 scan on {len(table)} disks, below the target of {MW_conf.ETA0_TARGET_DISKS}')

    failing = sorted(row['ratio'] for row in in_premise if not row['passed'])
    eta0 = float(np.nextafter(failing[0], -np.inf)) if failing else float(upper)

    logger.info(f'eta0 scan: {len(table)} disks, {len(failing)} failing, eta0 = {eta0:.4g}')
    return Eta0Scan(eta0, len(table), len(failing), table)

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def eta1_estimate(c_dec):
    """eta1 = exp(-1 - gamma0) with gamma0 = 2 log 2 + 2 log(2 C_dec), capped at 1"""

    if not c_dec > 0.0:
        return 1.0
    gamma0 = 2.0 * np.log(2.0) + 2.0 * np.log(2.0 * c_dec)
    return float(min(np.exp(-1.0 - gamma0), 1.0))

# -------------------------------------------------------------------------- #

def sequence_lemma(a0, c0, f):
    """Lower bounds b_n = c0^n (a0 - sum_{k<n} c0^-(k+1) f_k) for n = 0..len(f)

    Any sequence with a_{n+1} >= c0 a_n - f_n dominates b_n, with equality when
    the recursion holds exactly.
    """

    if not c0 > 1.0:
        logger.error(f'sequence_lemma needs c0 > 1, got {c0}')
        raise ValueError(f'sequence_lemma needs c0 > 1, got {c0}')

    bounds = [float(a0)]
    partial = 0.0
    for k, fk in enumerate(f):
        partial += fk / c0**(k + 1)
        bounds.append(c0**(k + 1) * (a0 - partial))
    return bounds

# -------------------------------------------------------------------------- #

def sequence_dominates(a, c0, f, rtol=1e-9):
    """Verify a sequence against the recursion and the lower bound

    Returns
    -------
    hypothesis : a_{n+1} >= c0 a_n - f_n for every available n
    dominates : a_n >= b_n for every available n
    """

    a = np.asarray(a, dtype=float)
    n = min(len(a) - 1, len(f))
    f = np.asarray(f[:n], dtype=float)

    hypothesis = bool(np.all(a[1:n + 1] >= c0 * a[:n] - f - rtol * (1.0 + np.abs(c0 * a[:n] - f))))
    bounds = np.asarray(sequence_lemma(a[0], c0, f))
    dominates = bool(np.all(a[:n + 1] >= bounds - rtol * (1.0 + np.abs(bounds))))
    return hypothesis, dominates

# -------------------------------------------------------------------------- #

def analyze_dyadic_energies(radii, energies, eps, c_dec):
    """Stopping index, log-energy recursion and super-exponential decay for a dyadic energy sequence

    Parameters
    ----------
    radii : r_n = 2^-n in unit-disk scale
    energies : E_n = E(D(r_n)) in unit-disk scale
    eps : unit-disk epsilon
    c_dec : decay constant

    Returns
    -------
    trace : IterationTrace
    """

    radii = np.asarray(radii, dtype=float)
    energies = np.asarray(energies, dtype=float)

    with np.errstate(divide='ignore'):
        A = np.where(energies > 0.0, -np.log(np.maximum(energies, 1e-300)), np.inf)

    n_idx = np.arange(radii.size)
    eligible = (energies >= 2.0**n_idx * eps**2) & (radii >= eps)
    n_eps = int(np.max(n_idx[eligible])) if np.any(eligible) else 0

    eta1 = eta1_estimate(c_dec)
    meray_premise = bool(energies.size and energies[0] <= eta1)

    records = []
    if energies.size > 1:
        increase = float(np.max(np.diff(energies)))
        records.append(MW_rep.inequality_record(
            'turnlog', max(increase, 0.0), 0.0, scale=max(float(energies[0]), 1e-12), tolerance=1e-12,
            details={'kind': 'nested energies'},
        ))

    log_term = np.log(2.0 * c_dec) if c_dec > 0.0 else -np.inf
    for n in range(n_eps):
        if not (np.isfinite(A[n]) and np.isfinite(A[n + 1])):
            continue
        bound = 1.5 * A[n] - 0.5 * np.log(2.0) * n - log_term
        records.append(MW_rep.inequality_record(
            'turnlog', bound, A[n + 1], scale=max(abs(A[n + 1]), 1.0), details={'n': n},
        ))
        records.append(MW_rep.inequality_record(
            'turnlog', energies[n], np.exp(-1.5**n), premise=meray_premise,
            details={'n': n, 'kind': 'super-exponential decay'},
        ))

    return IterationTrace(radii, energies, A, n_eps, float(c_dec), eta1, meray_premise, records)

# -------------------------------------------------------------------------- #

def iterate_dyadic(f, p, c_dec=None, disk=None):
    """Dyadic energy sequence E(D(2^-n)) on the unit disk (or a physical disk, rescaled)

    Parameters
    ----------
    f : Field (a solution)
    p : Potential
    c_dec : decay constant (default: minimal constant of decay_check on this field)
    disk : DiskSpec (default: the whole disk-shaped domain)

    Returns
    -------
    trace : IterationTrace
    """

    if disk is None:
        disk = _whole_disk(f)
    if c_dec is None:
        c_dec = decay_check(f, p, disk=disk).c_min

    R = disk.radius
    eps_unit = f.epsilon / R
    density = MW_fun.energy_density(f, p)

    radii = []
    energies = []
    n = 0
    while 2.0**(-n) >= eps_unit:
        r = 2.0**(-n)
        E, _ = _energy(f, p, disk.center, r * R, density)
        radii.append(r)
        energies.append(E / R)
        n += 1

    logger.debug(f'dyadic trace: {len(radii)} radii down to {radii[-1] if radii else None}')
    return analyze_dyadic_energies(radii, energies, eps_unit, c_dec)

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def kappacity_check(f, p, c, rho, kappa, sigma=None, disk=None, c_ups=None):
    """Energy on Upsilon(rho, kappa) against C_Ups [kappa int_D(rho) V/eps + eps int_circle e]

    Requires |u - s_main| < kappa on the circle of radius rho (unit-disk scale).

    Returns
    -------
    report : BoundReport
    """

    fu = MW_lvl._unit_field(f, disk)
    center = tuple(fu.grid.center)
    d = MW_gf.DiskSpec(center, rho)
    samples = MW_gf.restrict_circle(fu, d)

    if sigma is None:
        sigma = MW_lvl.circle_report(samples, p).sigma_main
    boundary_dist = float(np.max(np.linalg.norm(samples.values - p.wells[sigma].location, axis=-1)))
    if boundary_dist >= kappa:
        logger.error(f'|u - s_{sigma}| reaches {boundary_dist:.4g} >= kappa={kappa} on the circle of radius {rho}')
        raise MW_err.BoundaryConditionViolated(f'|u - s_{sigma}| reaches {boundary_dist:.4g} >= kappa={kappa} on the circle of radius {rho}')

    family = MW_lvl.region_family(fu, p, c, kappa, rho)
    upsilon = np.any(np.stack(family.upsilon), axis=0)

    density = MW_fun.energy_density(fu, p)
    w_disk = MW_gf.region_weights(fu.grid, d, clip=True, subsamples=MW_conf.COVERAGE_SUBSAMPLES_FINE)
    lhs = float(np.sum(w_disk * upsilon * density.e))
    potential_term = kappa * float(np.sum(w_disk * density.v))
    boundary_term = fu.epsilon * MW_fun.circle_energy(samples, p)
    rhs = potential_term + boundary_term

    report = BoundReport(
        'kappacity', lhs, rhs, _ratio(lhs, rhs),
        terms={'potential': potential_term, 'boundary': boundary_term, 'kappa': kappa, 'sigma': sigma},
    )
    if c_ups is not None:
        report.records.append(MW_rep.inequality_record('kappacity', lhs, c_ups * rhs, scale=max(rhs, lhs, 1e-12)))
    return report

# -------------------------------------------------------------------------- #

def kappacity_linearity(f, p, c, rho, kappa, sigma=None, disk=None):
    """Ratio of lhs/kappa at kappa and kappa/2; growth at most linear keeps it within a factor 2"""

    full = kappacity_check(f, p, c, rho, kappa, sigma, disk)
    half = kappacity_check(f, p, c, rho, 0.5 * kappa, sigma, disk)

    slope_full = full.lhs / kappa
    slope_half = half.lhs / (0.5 * kappa)
    if slope_full <= 0.0 and slope_half <= 0.0:
        change = 1.0
    elif slope_full <= 0.0 or slope_half <= 0.0:
        change = np.inf
    else:
        change = max(slope_full / slope_half, slope_half / slope_full)

    return MW_rep.inequality_record(
        'kappacity', change, 2.0, scale=2.0, details={'kind': 'linearity', 'kappa': kappa, 'rho': rho},
    )

# -------------------------------------------------------------------------- #

def borneo_check(f, p, M0, K_pot=MW_conf.K_POT_DEFAULT, c_pot=None, disk=None):
    """E(D(1/2)) <= C_pot [int_D(3/4) V/eps + eps int_{D(1)\\D(1/2)} e] on the unit disk

    The premise is E(D(1)) <= M0 and eps^-1 int_D(3/4) V <= K_pot.

    Returns
    -------
    report : BoundReport
    """

    fu = MW_lvl._unit_field(f, disk)
    center = fu.grid.center
    density = MW_fun.energy_density(fu, p)

    E1, _ = _energy(fu, p, center, 1.0, density)
    lhs, _ = _energy(fu, p, center, 0.5, density)
    _, V34 = _energy(fu, p, center, 0.75, density)
    shell = fu.epsilon * (E1 - lhs)
    rhs = V34 + shell

    premise = bool(E1 <= M0 and V34 <= K_pot)
    report = BoundReport(
        'borneo', lhs, rhs, _ratio(lhs, rhs), premise,
        terms={'potential': V34, 'shell': shell, 'energy': E1, 'M0': M0, 'K_pot': K_pot},
    )
    if not premise:
        logger.info(f'borneo premise not met: E={E1:.4g} (M0={M0:.4g}), V-mass={V34:.4g} (K_pot={K_pot:.4g})')
    if c_pot is not None:
        report.records.append(MW_rep.inequality_record(
            'borneo', lhs, c_pot * rhs, scale=max(rhs, lhs, 1e-12), premise=premise,
        ))
    return report

# -------------------------------------------------------------------------- #

def exterior_bound_check(f, p, U, delta, K_ext=MW_conf.K_EXT_DEFAULT, c_ext=None):
    """Energy near a subdomain controlled by its surrounding shell

    With U_s = {dist(x, U) <= s} and V_delta = U_delta \\ U, checks
    int_{U_delta/4} e <= C_ext (int_{V_delta} e + eps int_{U_delta} e) under the premise
    int_{V_delta} e <= K_ext, and reports eps^-1 int_{U_delta/2} V / int_{V_delta} e.

    Parameters
    ----------
    f : Field
    p : Potential
    U : boolean node mask of the subdomain
    delta : shell width

    Returns
    -------
    report : BoundReport
    """

    grid = f.grid
    U = np.asarray(U, dtype=bool)
    if U.shape != grid.shape:
        logger.error(f'mask shape {U.shape} does not match grid {grid.shape}')
        raise MW_err.MaskGeometryError(f'mask shape {U.shape} does not match grid {grid.shape}')

    pad = int(np.ceil(delta / grid.h)) + 1
    padded = np.pad(U, pad, constant_values=False)
    dist = ndim.distance_transform_edt(~padded) * grid.h

    U_delta_padded = dist <= delta
    U_delta = U_delta_padded[pad:-pad, pad:-pad]
    leaked = int(np.sum(U_delta_padded)) - int(np.sum(U_delta))
    if leaked or np.any(U_delta & ~grid.active):
        logger.error(f'U_delta (delta={delta}) leaks outside the domain')
        raise MW_err.MaskGeometryError(f'U_delta (delta={delta}) leaks outside the domain')

    inner_dist = dist[pad:-pad, pad:-pad]
    U_quarter = inner_dist <= 0.25 * delta
    U_half = inner_dist <= 0.5 * delta
    V_delta = U_delta & ~U

    w = MW_gf.node_weights(grid)
    density = MW_fun.energy_density(f, p)
    lhs = float(np.sum(w * U_quarter * density.e))
    shell = float(np.sum(w * V_delta * density.e))
    bulk = f.epsilon * float(np.sum(w * U_delta * density.e))
    potential_half = float(np.sum(w * U_half * density.v))

    premise = bool(shell <= K_ext)
    report = BoundReport(
        'exterior', lhs, shell + bulk, _ratio(lhs, shell + bulk), premise,
        terms={'shell': shell, 'bulk': bulk, 'potential_half': potential_half,
               'pohozaev_ratio': _ratio(potential_half, shell), 'K_ext': K_ext, 'delta': delta},
    )
    if c_ext is not None:
        report.records.append(MW_rep.inequality_record(
            'exterior', lhs, c_ext * (shell + bulk), scale=max(shell + bulk, lhs, 1e-12), premise=premise,
        ))
    return report

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

# ---- End of <MW_clearing.py> ----
