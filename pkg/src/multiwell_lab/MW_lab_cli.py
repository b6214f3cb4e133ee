# ---- This is <MW_lab_cli.py> ----

"""
Batch experiments: solve epsilon families, run checker suites and export concentration data
"""

import json
import pathlib
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict, fields

from loguru import logger

import numpy as np

import multiwell_lab
import multiwell_lab.MW_lab_config as MW_conf
import multiwell_lab.MW_errors as MW_err
import multiwell_lab.MW_potential as MW_pot
import multiwell_lab.MW_grid_field as MW_gf
import multiwell_lab.MW_field_io as MW_io
import multiwell_lab.MW_solver as MW_sol
import multiwell_lab.MW_functionals as MW_fun
import multiwell_lab.MW_levelsets as MW_lvl
import multiwell_lab.MW_clearing as MW_clr
import multiwell_lab.MW_concentration as MW_conc
import multiwell_lab.MW_reports as MW_rep

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

SUITES = ['potential', 'functionals', 'levelsets', 'clearing', 'concentration']

REQUIRED_KEYS = ['potential', 'domain', 'boundary', 'eps_list']

RUN_MANIFEST = 'run_manifest.json'

# exit codes
EXIT_OK       = 0
EXIT_FAILED   = 1
EXIT_USAGE    = 2
EXIT_SOLVER   = 3

# number of random disks for the Pohozaev checks
N_RANDOM_DISKS = 10

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

@dataclass
class ExperimentConfig:
    potential: object
    domain: dict
    boundary: object
    eps_list: list
    cells_per_eps: int = MW_conf.CELLS_PER_EPS
    solver: dict = field(default_factory=dict)
    suites: list = field(default_factory=lambda: list(SUITES))
    out: str = None
    manifest: str = None
    family_id: str = None

@dataclass
class Run:
    run_dir: pathlib.Path
    config: ExperimentConfig
    potential: MW_pot.Potential
    constants: MW_pot.StructuralConstants
    family: list
    family_id: str
    M0: float

    @property
    def manifest_path(self):
        return self.run_dir / MW_conf.MW_LAB_MANIFEST

    @property
    def solved(self):
        return [r for r in self.family if r.failure is None]

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def _set_loglevel(loglevel):
    # remove default logger handler and add personal one
    logger.remove()
    logger.add(sys.stderr, level=loglevel)

# -------------------------------------------------------------------------- #

def parse_suites(suite):
    """Comma-separated suite tags (or 'all') to a list of known suites"""

    if suite is None or suite == 'all':
        return list(SUITES)
    tags = [s.strip() for s in (suite.split(',') if isinstance(suite, str) else suite) if s.strip()]
    unknown = [s for s in tags if s not in SUITES]
    if unknown or not tags:
        logger.error(f'Unknown suite tag(s) {unknown}, choose from {SUITES}')
        raise MW_err.ConfigError(f'Unknown suite tag(s) {unknown}, choose from {SUITES}')
    return tags

# -------------------------------------------------------------------------- #

def load_config(path):
    """Read and validate an experiment config (JSON)

    Parameters
    ----------
    path : path to the JSON config file

    Returns
    -------
    cfg : ExperimentConfig
    """

    path = pathlib.Path(path).expanduser().absolute()
    if not path.is_file():
        logger.error(f'Cannot find config file: {path}')
        raise MW_err.ConfigError(f'Cannot find config file: {path}')

    with open(path) as fp:
        text = fp.read()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as E:
        logger.error(f'{path.name}: line {E.lineno}, column {E.colno}: {E.msg}')
        raise MW_err.ConfigError(f'{path.name}: line {E.lineno}, column {E.colno}: {E.msg}')

    if not isinstance(raw, dict):
        logger.error(f'{path.name}: top level must be a JSON object')
        raise MW_err.ConfigError(f'{path.name}: top level must be a JSON object')

    for key in REQUIRED_KEYS:
        if key not in raw:
            logger.error(f'{path.name}: missing required key `{key}`')
            raise MW_err.ConfigError(f'{path.name}: missing required key `{key}`')

    known = {f.name for f in fields(ExperimentConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        logger.warning(f'{path.name}: ignoring unknown keys {unknown}')

    cfg = ExperimentConfig(**{key: value for key, value in raw.items() if key in known})
    if cfg.family_id is None:
        cfg.family_id = path.stem

    try:
        cfg.eps_list = [float(e) for e in cfg.eps_list]
    except (TypeError, ValueError):
        logger.error(f'{path.name}: `eps_list` must be a list of numbers')
        raise MW_err.ConfigError(f'{path.name}: `eps_list` must be a list of numbers')
    if not cfg.eps_list or min(cfg.eps_list) <= 0.0 or any(b >= a for a, b in zip(cfg.eps_list, cfg.eps_list[1:])):
        logger.error(f'{path.name}: `eps_list` must be positive and strictly decreasing')
        raise MW_err.ConfigError(f'{path.name}: `eps_list` must be positive and strictly decreasing')

    if cfg.cells_per_eps < MW_conf.MIN_CELLS_PER_EPS:
        logger.error(f'{path.name}: `cells_per_eps` must be at least {MW_conf.MIN_CELLS_PER_EPS}')
        raise MW_err.ConfigError(f'{path.name}: `cells_per_eps` must be at least {MW_conf.MIN_CELLS_PER_EPS}')

    if not isinstance(cfg.domain, dict) or cfg.domain.get('shape') not in ('rectangle', 'disk'):
        logger.error(f'{path.name}: `domain` needs shape `rectangle` or `disk`')
        raise MW_err.ConfigError(f'{path.name}: `domain` needs shape `rectangle` or `disk`')

    cfg.suites = parse_suites(cfg.suites)
    solver_config(cfg)

    logger.debug(f'config: {asdict(cfg)}')
    return cfg

# -------------------------------------------------------------------------- #

def solver_config(cfg):
    """SolveConfig with the overrides of an experiment config"""

    try:
        return MW_sol.SolveConfig(**cfg.solver)
    except TypeError as E:
        logger.error(f'Invalid `solver` block: {E}')
        raise MW_err.ConfigError(f'Invalid `solver` block: {E}')

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def _field_name(eps):
    return 'field_eps_' + f'{eps:.6g}'.replace('.', 'p')

# -------------------------------------------------------------------------- #

def _family_ranges(family):
    hs = [r.field.grid.h for r in family]
    eps = [r.epsilon for r in family]
    return [min(hs), max(hs)], [min(eps), max(eps)]

# -------------------------------------------------------------------------- #

def cmd_solve(
    config,
    out=None,
    overwrite=False,
    threads=None,
    loglevel='INFO',
):
    """Solve the epsilon family of an experiment config and persist the fields

    Parameters
    ----------
    config : path to the JSON experiment config
    out : run directory (default=config `out` or MW_LAB_OUT/<family_id>)
    overwrite : overwrite an existing run (default=False)
    threads : unused by the solver, accepted for a uniform interface
    loglevel : loglevel setting (default='INFO')

    Returns
    -------
    code : 0 when every member converged, 3 otherwise (None if skipped)
    """

    _set_loglevel(loglevel)

    logger.info('Solving experiment family')
    logger.debug(f'{locals()}')

    cfg = load_config(config)
    if out is None:
        out = cfg.out if cfg.out is not None else pathlib.Path(MW_conf.MW_LAB_OUT) / cfg.family_id
    run_dir = pathlib.Path(out).expanduser().absolute()
    manifest_path = run_dir / RUN_MANIFEST

    logger.debug(f'run_dir:       {run_dir}')
    logger.debug(f'manifest_path: {manifest_path}')

    if manifest_path.is_file() and not overwrite:
        logger.info('Output file already exists, use `--overwrite` to force')
        return None

    p = MW_pot.get_potential(cfg.potential)
    family = MW_sol.solve_family(
        cfg.boundary, p, cfg.eps_list, solver_config(cfg),
        domain=cfg.domain, cells_per_eps=cfg.cells_per_eps,
    )

    members = []
    for result in family:
        path = MW_io.save_field(
            result.field, run_dir / 'fields' / _field_name(result.epsilon), overwrite=True,
            extra={'family_id': cfg.family_id, 'potential': p.name},
        )
        logger.info(f'eps={result.epsilon:.4g}: energy {result.energy:.10g}, converged {result.converged}')
        members.append({
            'epsilon': result.epsilon,
            'file': str(path.relative_to(run_dir)),
            'h': result.field.grid.h,
            'converged': result.converged,
            'failure': result.failure,
            'energy': result.energy,
            'max_amplitude': result.max_amplitude,
            'iterations': result.iterations,
            'under_resolved': result.under_resolved,
            'branch_jump': result.branch_jump,
            'residual_history': result.residual_history,
        })

    MW_rep.write_json(manifest_path, {
        'version': multiwell_lab.__version__,
        'config': asdict(cfg),
        'potential': p.name,
        'family_id': cfg.family_id,
        'M0': family[0].family_M0 if family else 0.0,
        'members': members,
    })

    # seed the constants manifest of the run
    if cfg.manifest is not None:
        seed = MW_rep.load_manifest(cfg.manifest)
        if seed['entries']:
            MW_rep.update_manifest(run_dir / MW_conf.MW_LAB_MANIFEST, seed['entries'])
            logger.info(f'Copied {len(seed["entries"])} seed constants from {cfg.manifest}')

    n_failed = sum(1 for r in family if r.failure is not None or not r.converged)
    if n_failed:
        logger.warning(f'{n_failed} of {len(family)} members did not converge')
        return EXIT_SOLVER
    return EXIT_OK

# -------------------------------------------------------------------------- #

def load_run(run_dir):
    """Reload config, potential, constants and solved members of a run directory

    Returns
    -------
    run : Run
    """

    run_dir = pathlib.Path(run_dir).expanduser().absolute()
    manifest_path = run_dir / RUN_MANIFEST
    if not manifest_path.is_file():
        logger.error(f'Cannot find run manifest: {manifest_path}')
        raise MW_err.MissingArtifacts(f'Cannot find run manifest: {manifest_path}')

    with open(manifest_path) as fp:
        manifest = json.load(fp)

    cfg = ExperimentConfig(**manifest['config'])
    p = MW_pot.get_potential(cfg.potential)
    c = MW_pot.derive_constants(p, validate=False)

    family = []
    for member in manifest['members']:
        path = run_dir / member['file']
        if not path.is_file():
            logger.error(f'Cannot find field file: {path}')
            raise MW_err.MissingArtifacts(f'Cannot find field file: {path}')
        family.append(MW_sol.SolveResult(
            field = MW_io.load_field(path),
            residual_history = member.get('residual_history', []),
            converged = member['converged'],
            energy = member['energy'],
            max_amplitude = member['max_amplitude'],
            iterations = member.get('iterations', 0),
            under_resolved = member.get('under_resolved', False),
            failure = member.get('failure'),
            branch_jump = member.get('branch_jump', False),
            epsilon = member['epsilon'],
            family_M0 = manifest['M0'],
        ))

    logger.info(f'Loaded run {run_dir.name}: {len(family)} members, M0 = {manifest["M0"]:.6g}')
    return Run(run_dir, cfg, p, c, family, manifest['family_id'], float(manifest['M0']))

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def _center_disk(grid, fraction=0.9):
    """Largest centred disk of the domain, shrunk by fraction"""
    center = tuple(grid.center)
    return MW_gf.DiskSpec(center, fraction * float(MW_gf.distance_to_boundary(grid, [center])[0]))

# -------------------------------------------------------------------------- #

def _random_disks(grid, eps, n=N_RANDOM_DISKS, seed=0):
    """n disks with radius in [2 eps, diam/4] contained in the domain, seeded"""

    rng = np.random.default_rng(seed)
    r_max = max(0.25 * grid.diameter, 2.0 * eps)
    disks = []
    for _ in range(1000 * n):
        r = rng.uniform(2.0 * eps, r_max)
        x0 = (rng.uniform(grid.x[0], grid.x[-1]), rng.uniform(grid.y[0], grid.y[-1]))
        d = MW_gf.DiskSpec(x0, r)
        if MW_gf.contains_disk(grid, d):
            disks.append(d)
        if len(disks) == n:
            break
    return disks

# -------------------------------------------------------------------------- #

def _vacuous(name, reason, **details):
    return MW_rep.inequality_record(name, 0.0, 0.0, premise=False, details={'reason': reason, **details})

# -------------------------------------------------------------------------- #

def _bound_records(reports, c_fit):
    return [
        MW_rep.inequality_record(
            rep.name, rep.lhs, c_fit * rep.rhs, scale=max(rep.rhs, rep.lhs, 1e-12), premise=rep.premise,
        )
        for rep in reports
    ]

# -------------------------------------------------------------------------- #

def _fit(reports):
    finite = [rep.c_min for rep in reports if rep.premise and np.isfinite(rep.c_min)]
    return float(max(finite, default=0.0))

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def suite_potential(run, threads=1):
    """Hypothesis validation and quadratic envelopes of the run potential"""

    p, c = run.potential, run.constants
    report = MW_pot.validate_hypotheses(p)
    records = [
        MW_rep.inequality_record(
            'hypothesis', 0.0 if check.passed else 1.0, 0.0, scale=1.0,
            details={'check': check.name, 'detail': check.detail},
        )
        for check in report.checks
    ]

    envelope = MW_pot.quadratic_envelope_check(p, c)
    records.append(MW_rep.inequality_record(
        'quadratic_envelope', envelope.max_violation, 0.0, scale=1.0,
        details={'n_samples': envelope.n_samples, 'per_well': envelope.per_well},
    ))
    return records

# -------------------------------------------------------------------------- #

def _member_functionals(run, result):

    p, c = run.potential, run.constants
    f = result.field
    grid = f.grid
    region = {'epsilon': f.epsilon}

    grad = MW_gf.gradient(f)
    density = MW_fun.energy_density(f, p, grad)
    stress = MW_fun.stress_tensor(f, p, grad)
    trace = np.abs(stress.T[..., 0, 0] + stress.T[..., 1, 1])

    records = [
        MW_rep.inequality_record(
            'pointwise_j', float(np.max(density.j - density.e)), 0.0,
            scale=max(float(np.max(density.e)), 1e-12), region=region,
        ),
        MW_rep.inequality_record('trace_free', float(np.max(trace)), 0.0, scale=1.0, region=region),
    ]

    for d in _random_disks(grid, f.epsilon):
        poho = MW_fun.pohozaev_residual(f, p, d, grad=grad)
        records.append(MW_rep.inequality_record(
            'pohozaev_identity', abs(poho.residual), 0.0, scale=max(abs(poho.lhs), abs(poho.rhs), 1e-12),
            region={'center': list(d.center), 'radius': d.radius, 'epsilon': f.epsilon},
        ))
        records.append(MW_fun.pohozaev_inequality_check(f, p, d))

    disk = _center_disk(grid)
    for X in MW_fun.bump_test_fields(grid, disk.center, disk.radius):
        res = MW_fun.stress_divergence_residual(f, p, X, grad=grad)
        details = {'test_field': res.name, 'epsilon': f.epsilon}
        records.append(MW_rep.inequality_record(
            'stress_weak_identity', abs(res.real), 0.0, scale=max(res.scale, 1e-12), details=details,
        ))
        records.append(MW_rep.inequality_record(
            'complex_stress_agreement', abs(res.real - res.complex), 0.0, scale=max(res.scale, 1e-12), details=details,
        ))

    radii = np.linspace(0.25 * disk.radius, disk.radius, 8)
    records.extend(MW_fun.monotonicity_profile(f, p, disk.center, radii).records)

    # positivity is only expected for scalar solutions, away from the boundary
    margin = 4.0 * f.epsilon
    xi_min = MW_fun.interior_discrepancy_min(f, p, margin)
    has_interior = float(MW_gf.distance_to_boundary(grid, [grid.center])[0]) >= margin
    records.append(MW_rep.inequality_record(
        'discrepancy_positivity', -xi_min, 0.0, scale=max(float(np.max(density.e)), 1e-12),
        tolerance=max(MW_conf.CHECK_TOLERANCES['discrepancy_positivity'], (grid.h / f.epsilon)**2),
        premise=bool(p.k == 1 and has_interior), region=region, details={'xi_min': xi_min, 'margin': margin},
    ))

    for i in range(p.q):
        records.extend(MW_fun.modica_mortola_map(f, p, c, i).records)

    # consistency error of the node quadrature is O((h/eps)^2)
    records.append(MW_rep.inequality_record(
        'weak_form', MW_sol.weak_form_residual(f, p), (grid.h / f.epsilon)**2, scale=1.0, region=region,
    ))
    records.extend(MW_sol.max_principle_check(result, p, c))
    return records

# -------------------------------------------------------------------------- #

def _member_levelsets(run, result):

    p, c = run.potential, run.constants
    f = result.field
    disk = _center_disk(f.grid)
    r1 = disk.radius
    r0 = max(f.epsilon, 0.5 * r1)
    if r0 >= r1:
        logger.warning(f'eps={f.epsilon:.4g}: centred disk of radius {r1:.4g} too small for level-set checks')
        return [_vacuous('good_radius', 'disk smaller than epsilon', epsilon=f.epsilon)]

    r, report = MW_lvl.good_radius(f, p, r0, r1, disk.center, c)
    records = list(report.records)
    sigma = report.sigma_main

    for i in range(p.q):
        records.extend(MW_lvl.coarea_length(f, p, c, i, disk).records)
        try:
            records.extend(MW_lvl.select_level(f, p, c, i, 0.5 * c.mu0, disk).records)
        except MW_err.NoRegularLevel as E:
            records.append(_vacuous('select_level', str(E), well=i, epsilon=f.epsilon))

    _, _, gradient_records = MW_lvl.level_gradient_bound(f, p, c, r1, disk.center)
    records.extend(gradient_records)

    kappa = 0.25 * c.mu0
    rho = 0.75
    records.extend(MW_lvl.region_family(f, p, c, kappa, rho, disk).records)

    # the radius set, good circle and level flux need |u - s| < kappa on the outer circle
    try:
        records.extend(MW_lvl.radius_set_measure(f, p, c, sigma, kappa, rho, disk).records)
    except MW_err.BoundaryConditionViolated as E:
        for name in ('radius_set', 'good_circle', 'level_flux'):
            records.append(_vacuous(name, str(E), sigma=sigma, epsilon=f.epsilon))
        return records

    try:
        _, circle = MW_lvl.good_circle_in_upsilon(f, p, c, sigma, kappa, rho, disk)
        records.extend(circle.records)
    except MW_err.EmptyRadiusSet as E:
        records.append(_vacuous('good_circle', str(E), sigma=sigma, epsilon=f.epsilon))

    kappas = np.linspace(0.125 * c.mu0, 0.5 * c.mu0, 4)
    records.extend(MW_lvl.level_flux_profile(f, p, c, sigma, rho, kappas, disk).records)
    return records

# -------------------------------------------------------------------------- #

def _map_members(worker, run, threads):
    members = run.solved
    if threads is None or threads <= 1:
        per_member = [worker(run, r) for r in members]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_member = list(pool.map(lambda r: worker(run, r), members))
    return [rec for records in per_member for rec in records]

# -------------------------------------------------------------------------- #

def suite_functionals(run, threads=1):
    """Pointwise, Pohozaev, stress, monotonicity, Modica-Mortola and solver checks per member"""
    return _map_members(_member_functionals, run, threads)

# -------------------------------------------------------------------------- #

def suite_levelsets(run, threads=1):
    """Good radius, coarea, level-gradient, region-family, radius-set and flux checks per member"""
    return _map_members(_member_levelsets, run, threads)

# -------------------------------------------------------------------------- #

def suite_clearing(run, threads=1):
    """Fit the clearing constants on the family, check against them and persist them

    Returns
    -------
    records : list of CheckRecord
    constants : dict of fitted constants (C_dec, C_nrg, C_ups, C_pot, C_ext, eta0, eta1)
    """

    p, c = run.potential, run.constants
    members = run.solved
    records = []

    disks = {id(r): _center_disk(r.field.grid) for r in members}

    # decay constant, with its variation over the family
    checks = [MW_clr.decay_check(r.field, p, disk=disks[id(r)]) for r in members]
    c_dec = MW_clr.fit_decay_constant(checks)
    for r in members:
        records.extend(MW_clr.decay_check(r.field, p, c_dec=c_dec, disk=disks[id(r)]).records)
    positive = [ch.c_min for ch in checks if ch.c_min > 0.0 and np.isfinite(ch.c_min)]
    if len(positive) > 1:
        records.append(MW_rep.inequality_record(
            'decay', max(positive) / min(positive), 2.0, scale=2.0, details={'kind': 'variation over family'},
        ))

    # clearing-out threshold and energy contraction
    constants = {'C_dec': c_dec, 'eta1': MW_clr.eta1_estimate(c_dec)}
    try:
        scan = MW_clr.eta0_scan(members, p, c)
    except MW_err.DegenerateFamily as E:
        logger.warning(f'eta0 scan is degenerate: {E}')
        records.append(_vacuous('clearing_out', str(E)))
        scan = None

    if scan is not None:
        constants['eta0'] = scan.eta0
        verdicts = []
        for r in members:
            for d in MW_clr.sample_disks(r.field.grid, r.field.epsilon):
                if d.radius >= r.field.epsilon:
                    verdicts.append((r, d, MW_clr.clearing_out_check(r.field, p, c, d, scan.eta0)))
        c_nrg = float(max((v.c_nrg_min for _, _, v in verdicts if v.premise and np.isfinite(v.c_nrg_min)), default=0.0))
        constants['C_nrg'] = c_nrg
        for r, d, v in verdicts:
            records.extend(v.records)
            if v.premise:
                records.append(MW_rep.inequality_record(
                    'clearing_out', v.energy_on_58, c_nrg * r.field.epsilon / d.radius * v.energy_on_r,
                    scale=max(v.energy_on_r, 1e-12), region={'center': list(d.center), 'radius': d.radius},
                    details={'kind': 'energy contraction'},
                ))
        logger.info(f'clearing-out: {len(verdicts)} disks, eta0 = {scan.eta0:.6g}, C_nrg = {c_nrg:.6g}')

    # dyadic iteration
    for r in members:
        records.extend(MW_clr.iterate_dyadic(r.field, p, c_dec, disk=disks[id(r)]).records)

    # kappacity, borneo and exterior bounds
    kappa = 0.25 * c.mu0
    kappacity = []
    for r in members:
        try:
            kappacity.append(MW_clr.kappacity_check(r.field, p, c, 0.75, kappa, disk=disks[id(r)]))
        except MW_err.BoundaryConditionViolated as E:
            records.append(_vacuous('kappacity', str(E), epsilon=r.epsilon))
    constants['C_ups'] = _fit(kappacity)
    records.extend(_bound_records(kappacity, constants['C_ups']))

    borneo = [MW_clr.borneo_check(r.field, p, run.M0, disk=disks[id(r)]) for r in members]
    constants['C_pot'] = _fit(borneo)
    records.extend(_bound_records(borneo, constants['C_pot']))

    exterior = []
    for r in members:
        grid = r.field.grid
        d = disks[id(r)]
        X, Y = grid.XY
        U = grid.active & (np.hypot(X - d.center[0], Y - d.center[1]) <= 0.25 * d.radius)
        exterior.append(MW_clr.exterior_bound_check(r.field, p, U, 0.5 * d.radius))
    constants['C_ext'] = _fit(exterior)
    records.extend(_bound_records(exterior, constants['C_ext']))

    for name, value in constants.items():
        logger.info(f'{name:6s}: {value:.6g}')

    return records, constants

# -------------------------------------------------------------------------- #

def _cone_points(cs, n=MW_conf.CONE_SAMPLE_POINTS):
    """Up to n regular skeleton cells, evenly spread, whose largest cone disk stays in the domain"""

    grid = cs.grid
    r_max = max(MW_conf.CONE_RADII_CELLS) * grid.h
    jj, ii = np.nonzero(cs.regular)
    if jj.size == 0:
        return []
    X, Y = grid.XY
    points = np.column_stack([X[jj, ii], Y[jj, ii]])
    points = points[MW_gf.distance_to_boundary(grid, points) >= r_max]
    if not len(points):
        return []
    picks = np.unique(np.linspace(0, len(points) - 1, min(n, len(points))).round().astype(int))
    return [tuple(points[k]) for k in picks]

# -------------------------------------------------------------------------- #

def _set_records(stack, cs):
    """Covering, transfer, pocket, connectivity, tangent-cone and first-variation records of a set"""

    grid = stack.grid
    records = list(cs.records)

    delta = 4.0 * grid.h
    records.extend(MW_conc.covering_length_estimate(cs, delta).records)
    records.append(MW_conc.clearing_transfer_check(stack, cs))
    records.append(MW_conc.bordurer_check(stack, cs))

    # D(x0, 2r) stays in the domain
    disk = _center_disk(grid, fraction=0.45)
    try:
        records.extend(MW_conc.connectivity_check(cs, disk.center, disk.radius).records)
    except MW_err.DiskOutsideDomain as E:
        records.append(_vacuous('connectivity', str(E)))

    points = _cone_points(cs)
    if not points:
        records.append(_vacuous('tangent_cone', 'no regular skeleton cell away from the boundary'))
    for x0 in points:
        try:
            records.extend(MW_conc.tangent_cone_check(cs, x0, MW_conf.CONE_SLOPE).records)
        except MW_err.NotRegularPoint as E:
            records.append(_vacuous('tangent_cone', str(E), point=list(x0)))

    residuals = MW_conc.first_variation_residual(stack, cs, disk.center, disk.radius)
    records.append(_vacuous('first_variation', 'exploratory, nothing asserted', residuals=residuals))
    return records

# -------------------------------------------------------------------------- #

def suite_concentration(run, eta0=None, threads=1):
    """Concentration set, covering, clearing transfer, pockets, connectivity, tangent cones and limiting Hopf checks

    Parameters
    ----------
    run : Run
    eta0 : threshold, or None to scan the family; a degenerate scan leaves the set checks vacuous
    threads : accepted for a uniform interface

    Returns
    -------
    records : list of CheckRecord
    cs : ConcentrationSet (None without a threshold)
    hopf : (HopfLimit, shear FrameProfile, dilation FrameProfile); profiles None when the frame hypothesis fails
    """

    p = run.potential
    members = run.solved
    if len(members) < 2:
        logger.error('Concentration needs at least two solved epsilon members')
        raise MW_err.InsufficientFamily('Concentration needs at least two solved epsilon members')

    stack = MW_conc.build_measure_stack(members, p)
    if eta0 is None:
        try:
            eta0 = MW_clr.eta0_scan(members, p, run.constants).eta0
        except MW_err.DegenerateFamily as E:
            logger.warning(f'No threshold for the concentration set: {E}')

    records = []
    cs = None
    if eta0 is None:
        for name in ('length_bound', 'covering', 'connectivity', 'tangent_cone'):
            records.append(_vacuous(name, 'eta0 scan is degenerate'))
    else:
        cs = MW_conc.extract_sstar(stack, eta0)
        records.extend(_set_records(stack, cs))

    hl = MW_conc.limit_hopf(stack)
    records.extend(hl.records)

    boundary = run.config.boundary
    if isinstance(boundary, str) and boundary.startswith('two-phase:'):
        angle = np.deg2rad(float(boundary.split(':', 1)[1]))
        records.append(MW_conc.rotation_covariance_check(hl, angle))

    disk = _center_disk(stack.grid, fraction=0.5 / np.sqrt(2.0))
    shear = dilation = None
    try:
        shear = MW_conc.shear_constancy_check(hl, disk.center, disk.radius)
        dilation = MW_conc.dilation_constancy_check(hl, disk.center, disk.radius)
        records.extend(shear.records)
        records.extend(dilation.records)
    except MW_err.HypothesisNotMet as E:
        logger.warning(f'Frame checks skipped: {E}')
        records.append(_vacuous('shear_constancy', str(E)))
        records.append(_vacuous('dilation_constancy', str(E)))

    return records, cs, (hl, shear, dilation)

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def _meta(run, suite, **extra):
    meta = {
        'suite': suite,
        'family_id': run.family_id,
        'potential': run.potential.name,
        'epsilons': [r.epsilon for r in run.family],
        'M0': run.M0,
        'version': multiwell_lab.__version__,
    }
    meta.update(extra)
    return meta

# -------------------------------------------------------------------------- #

def _manifest_entries(run, constants):
    grid_range, eps_range = _family_ranges(run.solved)
    return [
        MW_rep.manifest_entry(run.potential.name, run.family_id, name, value, grid_range, eps_range)
        for name, value in sorted(constants.items())
    ]

# -------------------------------------------------------------------------- #

def cmd_check(
    run_dir,
    suite='all',
    eta0='scan',
    threads=None,
    loglevel='INFO',
):
    """Run checker suites on a solved run and write one report per suite

    Parameters
    ----------
    run_dir : run directory written by cmd_solve
    suite : comma-separated suite tags or 'all' (default='all')
    eta0 : 'scan', 'manifest' or a numeric threshold for the concentration suite (default='scan')
    threads : worker threads for per-member suites (default=MW_LAB_THREADS)
    loglevel : loglevel setting (default='INFO')

    Returns
    -------
    code : 0 if all non-vacuous checks pass, 1 otherwise
    """

    _set_loglevel(loglevel)

    logger.info('Running checker suites')
    logger.debug(f'{locals()}')

    suites = parse_suites(suite)
    threads = MW_conf.MW_LAB_THREADS if threads is None else int(threads)
    run = load_run(run_dir)

    if not run.solved:
        logger.error('No converged member in this run')
        raise MW_err.InsufficientFamily('No converged member in this run')
    if eta0 not in (None, 'scan'):
        eta0 = resolve_eta0(run, eta0)
    else:
        eta0 = None

    all_records = []
    constants = {}
    for name in suites:
        logger.info(f'Suite {name}')
        if name == 'potential':
            records = suite_potential(run, threads)
        elif name == 'functionals':
            records = suite_functionals(run, threads)
        elif name == 'levelsets':
            records = suite_levelsets(run, threads)
        elif name == 'clearing':
            records, fitted = suite_clearing(run, threads)
            constants.update(fitted)
        else:
            value = eta0 if eta0 is not None else constants.get('eta0')
            records, _, _ = suite_concentration(run, value, threads)

        MW_rep.write_report(run.run_dir, name, records, _meta(run, name))
        all_records.extend(records)

    if constants:
        MW_rep.update_manifest(run.manifest_path, _manifest_entries(run, constants))
        logger.info(f'Updated constants manifest {run.manifest_path.name}')

    n_failed = sum(1 for r in all_records if not r.vacuous and not r.passed)
    logger.info(f'{len(all_records)} checks, {n_failed} failed')
    return EXIT_OK if n_failed == 0 else EXIT_FAILED

# -------------------------------------------------------------------------- #

def resolve_eta0(run, eta0):
    """Threshold from 'scan', 'manifest' or a numeric value"""

    if eta0 is None or eta0 == 'scan':
        try:
            return MW_clr.eta0_scan(run.solved, run.potential, run.constants).eta0
        except MW_err.DegenerateFamily as E:
            logger.error(f'{E}, pass `--eta0 VALUE` or `--eta0 manifest`')
            raise MW_err.InsufficientFamily(f'{E}, pass `--eta0 VALUE` or `--eta0 manifest`')

    if eta0 == 'manifest':
        manifest = MW_rep.load_manifest(run.manifest_path)
        value = MW_rep.manifest_value(manifest, 'eta0', run.potential.name, run.family_id)
        if value is None:
            value = MW_rep.manifest_value(manifest, 'eta0', run.potential.name)
        if value is None:
            logger.error(f'No eta0 for {run.potential.name} in {run.manifest_path}, run `check --suite clearing` first')
            raise MW_err.ConfigError(f'No eta0 for {run.potential.name} in {run.manifest_path}, run `check --suite clearing` first')
        return float(value)

    try:
        value = float(eta0)
    except ValueError:
        logger.error(f'eta0 must be scan, manifest or a number, got {eta0}')
        raise MW_err.ConfigError(f'eta0 must be scan, manifest or a number, got {eta0}')
    if not value > 0.0:
        logger.error(f'eta0 must be positive, got {value}')
        raise MW_err.ConfigError(f'eta0 must be positive, got {value}')
    return value

# -------------------------------------------------------------------------- #

def cmd_concentrate(
    run_dir,
    eta0='scan',
    overwrite=False,
    threads=None,
    loglevel='INFO',
):
    """Extract the concentration set of a run and export cells, summary and Hopf frame table

    Parameters
    ----------
    run_dir : run directory written by cmd_solve
    eta0 : 'scan', 'manifest' or a numeric threshold (default='scan')
    overwrite : overwrite existing exports (default=False)
    threads : accepted for a uniform interface
    loglevel : loglevel setting (default='INFO')

    Returns
    -------
    code : 0 if all non-vacuous checks pass, 1 otherwise (None if skipped)
    """

    _set_loglevel(loglevel)

    logger.info('Extracting concentration set')
    logger.debug(f'{locals()}')

    run = load_run(run_dir)
    out_dir = run.run_dir / 'concentration'
    if (out_dir / 'sstar_summary.json').is_file() and not overwrite:
        logger.info('Output file already exists, use `--overwrite` to force')
        return None

    if len(run.solved) < 2:
        logger.error('Concentration needs at least two solved epsilon members')
        raise MW_err.InsufficientFamily('Concentration needs at least two solved epsilon members')

    value = resolve_eta0(run, eta0)
    records, cs, (hl, shear, dilation) = suite_concentration(run, value, threads)

    MW_conc.export_concentration(cs, out_dir, overwrite=True)
    if shear is not None:
        MW_conc.export_hopf_table(shear, dilation, out_dir / 'hopf_frame.csv', overwrite=True)

    logger.info(f'{cs.n_components} component(s), total length {cs.total_length:.6g}, {cs.junctions} junction(s)')
    MW_rep.write_report(run.run_dir, 'concentrate', records, _meta(run, 'concentrate', eta0=value))

    n_failed = sum(1 for r in records if not r.vacuous and not r.passed)
    return EXIT_OK if n_failed == 0 else EXIT_FAILED

# -------------------------------------------------------------------------- #

def cmd_constants(run_dir, loglevel='INFO'):
    """Print the constants manifest of a run directory"""

    _set_loglevel(loglevel)

    run_dir = pathlib.Path(run_dir).expanduser().absolute()
    if not (run_dir / RUN_MANIFEST).is_file():
        logger.error(f'Cannot find run manifest in {run_dir}')
        raise MW_err.MissingArtifacts(f'Cannot find run manifest in {run_dir}')

    manifest = MW_rep.load_manifest(run_dir / MW_conf.MW_LAB_MANIFEST)
    sys.stdout.write(MW_rep.dumps(manifest))
    return EXIT_OK

# -------------------------------------------------------------------------- #

def cmd_version(loglevel='INFO'):
    """Print the package version"""

    sys.stdout.write(f'multiwell_lab {multiwell_lab.__version__}\n')
    return EXIT_OK

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

# ---- End of <MW_lab_cli.py> ----
