# ---- This is <MW_solver.py> ----

"""
Numerical critical points of E_eps: semi-implicit relaxation, damped Newton
refinement and warm-started families over decreasing epsilon
"""

import pathlib
from dataclasses import dataclass, field

from loguru import logger

import numpy as np

from scipy import sparse
from scipy.sparse.linalg import cg, factorized

import multiwell_lab.MW_lab_config as MW_conf
import multiwell_lab.MW_errors as MW_err
import multiwell_lab.MW_potential as MW_pot
import multiwell_lab.MW_grid_field as MW_gf
import multiwell_lab.MW_functionals as MW_fun
import multiwell_lab.MW_reports as MW_rep

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

# relaxation steps tried when no Newton direction decreases the residual
FALLBACK_FLOW_STEPS = 20

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

@dataclass
class SolveConfig:
    max_gradient_flow_steps: int = MW_conf.SOLVER_MAX_FLOW_STEPS
    flow_dt_safety: float = MW_conf.SOLVER_FLOW_DT_SAFETY
    newton_max_iters: int = MW_conf.SOLVER_NEWTON_MAX_ITERS
    residual_tol: float = MW_conf.SOLVER_RESIDUAL_TOL
    seed_strategy: str = MW_conf.SOLVER_SEED_STRATEGY
    cg_maxiter: int = MW_conf.SOLVER_CG_MAXITER
    cg_rtol: float = MW_conf.SOLVER_CG_RTOL

    def __post_init__(self):
        if not 0.0 < self.flow_dt_safety < 1.0:
            logger.error(f'flow_dt_safety must be in (0,1), got {self.flow_dt_safety}')
            raise ValueError(f'flow_dt_safety must be in (0,1), got {self.flow_dt_safety}')
        if not self.residual_tol > 0.0:
            logger.error(f'residual_tol must be positive, got {self.residual_tol}')
            raise ValueError(f'residual_tol must be positive, got {self.residual_tol}')
        if self.seed_strategy not in MW_conf.SOLVER_SEED_STRATEGIES:
            logger.error(f'{self.seed_strategy} is not a valid choice for seed_strategy')
            raise ValueError(f'{self.seed_strategy} is not a valid choice for seed_strategy')

# -------------------------------------------------------------------------- #

@dataclass
class SolveResult:
    field: MW_gf.Field
    residual_history: list
    converged: bool
    energy: float
    max_amplitude: float
    iterations: int = 0
    under_resolved: bool = False
    failure: str = None
    branch_jump: bool = False
    epsilon: float = None
    family_M0: float = None
    energy_history: list = field(default_factory=list)

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def _free_nodes(grid, bc):
    """Nodes updated by the solver: inside nodes (dirichlet) or all active nodes (neumann)"""
    return grid.inside if bc == 'dirichlet' else grid.active

# -------------------------------------------------------------------------- #

def _max_amplitude(f):
    return float(np.max(np.linalg.norm(f.values[f.grid.active], axis=-1), initial=0.0))

# -------------------------------------------------------------------------- #

def discrete_energy(f, p):
    """Link energy (eps/2) sum |du|^2 + h^2 sum V/eps, the Lyapunov functional of the relaxation"""

    h = f.grid.h
    dx, dy = MW_gf.edge_differences(f)
    V = np.maximum(p.V(f.values[f.grid.active]), 0.0)
    return float(0.5 * f.epsilon * h**2 * (np.sum(dx**2) + np.sum(dy**2)) + h**2 * np.sum(V) / f.epsilon)

# -------------------------------------------------------------------------- #

def residual(f, p):
    """F(u) = -Lap u + eps^-2 grad V(u) on the free nodes (zero elsewhere)"""

    F = -MW_gf.laplacian(f) + p.grad(f.values) / f.epsilon**2
    F[~_free_nodes(f.grid, f.bc)] = 0.0
    return F

def scaled_residual(f, p, F=None):
    """eps^2 |F|_inf / (1 + |u|_inf)"""

    if F is None:
        F = residual(f, p)
    return float(f.epsilon**2 * np.max(np.abs(F)) / (1.0 + _max_amplitude(f)))

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def _three_phase_weights(grid, angles, eps):
    """Sector weights 1 - tanh(d_i / (sqrt(2) eps)) with d_i the signed distance to sector i"""

    X, Y = grid.XY
    c = grid.center
    PX = X - c[0]
    PY = Y - c[1]
    rho = np.hypot(PX, PY)
    phi = np.mod(np.arctan2(PY, PX), 2.0 * np.pi)

    def ray_distance(a):
        diff = phi - a
        proj = np.cos(diff)
        return np.where(proj >= 0.0, rho * np.abs(np.sin(diff)), rho)

    weights = []
    n = len(angles)
    for i in range(n):
        a0 = angles[i]
        a1 = angles[(i + 1) % n]
        span = np.mod(a1 - a0, 2.0 * np.pi)
        inside = np.mod(phi - a0, 2.0 * np.pi) <= span
        dist = np.minimum(ray_distance(a0), ray_distance(a1))
        signed = np.where(inside, -dist, dist)
        weights.append(1.0 - np.tanh(signed / (np.sqrt(2.0) * eps)))

    weights = np.stack(weights, axis=-1)
    return weights / np.maximum(np.sum(weights, axis=-1, keepdims=True), 1e-300)

# -------------------------------------------------------------------------- #

def boundary_values(spec, grid, p, eps):
    """Boundary data evaluated at every node of the grid

    Parameters
    ----------
    spec : 'constant-well:i', 'two-phase:angle', 'three-phase:a1,a2,a3' (angles in degrees),
           'trace:path' or {'trace_csv': path} with rows theta, u1..uk
    grid : Grid
    p : Potential
    eps : epsilon, width of the blended transitions

    Returns
    -------
    values : array (ny+1, nx+1, k)

    Examples
    --------
    boundary_values('two-phase:0', grid, gl_scalar(), 0.05)
    """

    if isinstance(spec, dict):
        if 'trace_csv' not in spec:
            logger.error('Boundary block needs a trace_csv key')
            raise MW_err.ConfigError('Boundary block needs a trace_csv key')
        return _trace_values(spec['trace_csv'], grid, p)

    if not isinstance(spec, str) or ':' not in spec:
        logger.error(f'{spec} is not a valid boundary spec')
        raise MW_err.ConfigError(f'{spec} is not a valid boundary spec')

    kind, arg = spec.split(':', 1)
    sigma = p.sigma
    X, Y = grid.XY

    try:
        if kind == 'constant-well':
            i = int(arg)
            if not 0 <= i < p.q:
                raise ValueError(f'well index {i} out of range')
            return np.broadcast_to(sigma[i], grid.shape + (p.k,)).copy()

        if kind == 'two-phase':
            a = np.deg2rad(float(arg))
            c = grid.center
            s = -(X - c[0]) * np.sin(a) + (Y - c[1]) * np.cos(a)
            t = 0.5 * (1.0 + np.tanh(s / (np.sqrt(2.0) * eps)))
            return sigma[0] + (sigma[1] - sigma[0]) * t[..., None]

        if kind == 'three-phase':
            angles = np.deg2rad([float(a) for a in arg.split(',')])
            if angles.size != 3 or p.q < 3:
                raise ValueError('three-phase data needs three angles and three wells')
            weights = _three_phase_weights(grid, np.sort(np.mod(angles, 2.0 * np.pi)), eps)
            return np.einsum('...i,ik->...k', weights, sigma[:3])

        if kind == 'trace':
            return _trace_values(arg, grid, p)
    except ValueError as E:
        logger.error(f'Invalid boundary spec {spec}: {E}')
        raise MW_err.ConfigError(f'Invalid boundary spec {spec}: {E}')

    logger.error(f'{kind} is not a valid boundary preset')
    raise MW_err.ConfigError(f'{kind} is not a valid boundary preset')

# -------------------------------------------------------------------------- #

def _trace_values(path, grid, p):
    """Periodic linear interpolation in angle of a tabulated trace theta -> R^k"""

    path = pathlib.Path(path).expanduser()
    if not path.is_file():
        logger.error(f'Cannot find boundary trace: {path}')
        raise MW_err.ConfigError(f'Cannot find boundary trace: {path}')

    table = np.loadtxt(path, delimiter=',', ndmin=2, comments='#')
    if table.shape[1] != p.k + 1:
        logger.error(f'Boundary trace has {table.shape[1] - 1} components, potential has k={p.k}')
        raise MW_err.ConfigError(f'Boundary trace has {table.shape[1] - 1} components, potential has k={p.k}')

    X, Y = grid.XY
    c = grid.center
    phi = np.arctan2(Y - c[1], X - c[0])
    theta = table[:, 0]
    out = np.empty(grid.shape + (p.k,))
    for m in range(p.k):
        out[..., m] = np.interp(phi, theta, table[:, m + 1], period=2.0 * np.pi)
    return out

# -------------------------------------------------------------------------- #

def harmonic_extension(grid, boundary):
    """Discrete harmonic function on the inside nodes with the given boundary node values"""

    L = MW_gf.laplacian_matrix(grid, 'dirichlet')
    inside = np.flatnonzero(grid.inside.ravel())
    fixed = np.flatnonzero((grid.active & ~grid.inside).ravel())
    values = np.asarray(boundary, dtype=float).reshape(-1, boundary.shape[-1]).copy()

    L_ii = L[inside][:, inside].tocsc()
    L_ib = L[inside][:, fixed]
    solve = factorized(L_ii)
    rhs = -(L_ib @ values[fixed])
    for m in range(values.shape[1]):
        values[inside, m] = solve(np.ascontiguousarray(rhs[:, m]))

    return values.reshape(boundary.shape)

# -------------------------------------------------------------------------- #

def initial_guess(grid, boundary, p, strategy=MW_conf.SOLVER_SEED_STRATEGY, supplied=None):
    """Seed field values for the relaxation

    Parameters
    ----------
    grid : Grid
    boundary : boundary node values (ny+1, nx+1, k)
    p : Potential
    strategy : 'from-boundary', 'from-wells-voronoi' or 'supplied'
    supplied : node values used with strategy 'supplied'

    Returns
    -------
    values : array (ny+1, nx+1, k) carrying the boundary data on boundary nodes
    """

    if strategy not in MW_conf.SOLVER_SEED_STRATEGIES:
        logger.error(f'{strategy} is not a valid choice for seed_strategy')
        raise ValueError(f'{strategy} is not a valid choice for seed_strategy')

    if strategy == 'supplied':
        if supplied is None:
            logger.error('seed_strategy supplied needs a supplied field')
            raise ValueError('seed_strategy supplied needs a supplied field')
        values = np.array(supplied, dtype=float).reshape(grid.shape + (p.k,))
    else:
        values = harmonic_extension(grid, boundary)
        if strategy == 'from-wells-voronoi':
            index, _ = MW_pot.nearest_well_field(p, values)
            values = p.sigma[index]

    pinned = grid.active & ~grid.inside
    values[pinned] = boundary[pinned]
    return values

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def _flow(f, p, steps, cfg):
    """Semi-implicit gradient-flow steps without resolution checks

    Returns
    -------
    f : relaxed Field
    history : discrete energy after each step (first entry is the start)
    """

    grid = f.grid
    eps = f.epsilon
    k = f.k
    lambda_max = max(w.hess_max for w in p.wells)
    dt = cfg.flow_dt_safety * eps**2 / lambda_max

    free = np.flatnonzero(_free_nodes(grid, f.bc).ravel())
    fixed = np.flatnonzero((grid.active & ~_free_nodes(grid, f.bc)).ravel())

    L = MW_gf.laplacian_matrix(grid, f.bc)
    L_ff = L[free][:, free]
    L_fb = L[free][:, fixed]
    solve = factorized((sparse.identity(free.size, format='csc') - dt * L_ff).tocsc())

    u = f.values.reshape(-1, k).copy()
    coupling = dt * np.asarray(L_fb @ u[fixed]) if fixed.size else 0.0
    bound = MW_conf.SOLVER_BLOWUP_FACTOR * (p.R0 + 1.0)

    current = f
    E0 = discrete_energy(f, p)
    history = [E0]
    energy_slack = MW_conf.SOLVER_ENERGY_TOL * max(E0, 1e-4)
    increases = 0

    for n in range(steps):
        u_free = u[free]
        rhs = u_free - dt / eps**2 * p.grad(u_free) + coupling
        new = np.column_stack([solve(np.ascontiguousarray(rhs[:, m])) for m in range(k)])
        change = float(np.max(np.abs(new - u_free), initial=0.0))
        u[free] = new

        current = f.with_values(u.reshape(f.values.shape))
        amplitude = _max_amplitude(current)
        if not np.isfinite(amplitude) or amplitude > bound:
            logger.error(f'Relaxation blew up at step {n}: sup|u| = {amplitude} > {bound}')
            raise MW_err.BlowUp(f'Relaxation blew up at step {n}: sup|u| = {amplitude} > {bound}')

        E = discrete_energy(current, p)
        if E > history[-1] + energy_slack:
            increases += 1
        history.append(E)

        if eps**2 * change / dt / (1.0 + amplitude) <= 100.0 * cfg.residual_tol:
            logger.debug(f'relaxation stationary after {n + 1} steps')
            break

    if increases:
        logger.warning(f'Energy increased in {increases} of {len(history) - 1} relaxation steps')

    return current, history

# -------------------------------------------------------------------------- #

def relax(f, p, steps=None, cfg=None, return_history=False):
    """Semi-implicit gradient-flow relaxation toward a critical point

    u^{n+1} = (I - dt Lap)^-1 (u^n - dt eps^-2 grad V(u^n)) with dt = safety eps^2 / lambda_max

    Parameters
    ----------
    f : Field
    p : Potential
    steps : maximal number of steps (default=cfg.max_gradient_flow_steps)
    cfg : SolveConfig (default=SolveConfig())
    return_history : also return the discrete energy history (default=False)

    Returns
    -------
    f : relaxed Field (and the energy history)
    """

    if cfg is None:
        cfg = SolveConfig()
    if steps is None:
        steps = cfg.max_gradient_flow_steps

    ratio = f.grid.h / f.epsilon
    if ratio > MW_conf.RELAX_MAX_H_RATIO:
        logger.error(f'Grid too coarse for relaxation: h/eps = {ratio:.3g} > {MW_conf.RELAX_MAX_H_RATIO}')
        raise ValueError(f'Grid too coarse for relaxation: h/eps = {ratio:.3g} > {MW_conf.RELAX_MAX_H_RATIO}')
    if ratio > MW_conf.RELAX_WARN_H_RATIO:
        logger.warning(f'Grid marginally resolved: h/eps = {ratio:.3g}')

    logger.info(f'Relaxing field (eps={f.epsilon:.4g}, h={f.grid.h:.4g}, steps<={steps})')

    relaxed, history = _flow(f, p, steps, cfg)

    if return_history:
        return relaxed, history
    return relaxed

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def _jacobian(f, p, free, positive_part=False):
    """Sparse Jacobian -kron(L, I_k) + eps^-2 blockdiag(Hess V) on the free nodes"""

    k = f.k
    L = MW_gf.laplacian_matrix(f.grid, f.bc)
    L_ff = L[free][:, free]
    H = p.hess(f.values.reshape(-1, k)[free])

    if positive_part:
        eig, Q = np.linalg.eigh(H)
        H = np.einsum('nij,nj,nkj->nik', Q, np.maximum(eig, 0.0), Q)

    n = free.size
    block = sparse.bsr_matrix((H / f.epsilon**2, np.arange(n), np.arange(n + 1)), shape=(n * k, n * k))
    return (-sparse.kron(L_ff, sparse.identity(k), format='csr') + block.tocsr()).tocsr()

# -------------------------------------------------------------------------- #

def _newton_direction(J, F, cfg):

    diag = J.diagonal()
    M = sparse.diags(1.0 / diag) if np.all(diag > 0.0) else None
    delta, info = cg(J, -F, rtol=cfg.cg_rtol, maxiter=cfg.cg_maxiter, M=M)
    if info != 0:
        logger.debug(f'cg returned info={info}')
    return delta

# -------------------------------------------------------------------------- #

def _line_search(f, p, free, delta, norm0):

    k = f.k
    base = f.values.reshape(-1, k)
    for step in MW_conf.SOLVER_LINE_SEARCH:
        trial = base.copy()
        trial[free] += step * delta.reshape(-1, k)
        if not np.all(np.isfinite(trial)):
            continue
        candidate = f.with_values(trial.reshape(f.values.shape))
        norm = float(np.linalg.norm(residual(candidate, p)))
        if norm < norm0:
            return candidate, step
    return None, 0.0

# -------------------------------------------------------------------------- #

def newton_refine(f, p, cfg=None):
    """Damped Newton refinement of a relaxed field

    Directions come from conjugate gradients on the Jacobian of F(u) = -Lap u + eps^-2 grad V(u);
    if no step along it decreases |F|, the positive part of the Hessian is used, and
    finally a few relaxation steps.

    Parameters
    ----------
    f : Field near a critical point
    p : Potential
    cfg : SolveConfig (default=SolveConfig())

    Returns
    -------
    result : SolveResult; converged when eps^2 |F|_inf / (1 + |u|_inf) <= residual_tol
    """

    if cfg is None:
        cfg = SolveConfig()

    under_resolved = f.grid.h > MW_conf.RELAX_MAX_H_RATIO * f.epsilon
    if under_resolved:
        logger.warning(f'Under-resolved grid: h={f.grid.h:.4g} > eps/4 (eps={f.epsilon:.4g})')

    free = np.flatnonzero(_free_nodes(f.grid, f.bc).ravel())
    bound = MW_conf.SOLVER_BLOWUP_FACTOR * (p.R0 + 1.0)

    F = residual(f, p)
    history = [scaled_residual(f, p, F)]
    converged = history[0] <= cfg.residual_tol
    iterations = 0

    logger.info(f'Newton refinement: initial scaled residual {history[0]:.3e}')

    while not converged and iterations < cfg.newton_max_iters:
        iterations += 1
        F_free = F.reshape(-1, f.k)[free].ravel()
        norm0 = float(np.linalg.norm(F_free))

        candidate = None
        for positive_part in (False, True):
            J = _jacobian(f, p, free, positive_part=positive_part)
            delta = _newton_direction(J, F_free, cfg)
            candidate, step = _line_search(f, p, free, delta, norm0)
            if candidate is not None:
                logger.debug(f'iteration {iterations}: step {step} (positive part: {positive_part})')
                break

        if candidate is None:
            logger.debug(f'iteration {iterations}: falling back to relaxation')
            candidate, _ = _flow(f, p, FALLBACK_FLOW_STEPS, cfg)

        f = candidate
        if _max_amplitude(f) > bound:
            logger.error(f'Newton iterate blew up: sup|u| = {_max_amplitude(f)} > {bound}')
            raise MW_err.BlowUp(f'Newton iterate blew up: sup|u| = {_max_amplitude(f)} > {bound}')

        F = residual(f, p)
        history.append(scaled_residual(f, p, F))
        converged = history[-1] <= cfg.residual_tol

    if not converged:
        if min(history[1:], default=history[0]) >= history[0]:
            logger.error(f'Newton stagnated after {iterations} iterations at {history[-1]:.3e}')
            raise MW_err.StagnationError(f'Newton stagnated after {iterations} iterations at {history[-1]:.3e}')
        logger.warning(f'Newton did not reach {cfg.residual_tol:g}: scaled residual {history[-1]:.3e}')
    else:
        logger.info(f'Newton converged in {iterations} iterations: {history[-1]:.3e}')

    energy, _ = MW_fun.energy_on_region(f, p)

    return SolveResult(
        field = f,
        residual_history = history,
        converged = bool(converged),
        energy = energy,
        max_amplitude = _max_amplitude(f),
        iterations = iterations,
        under_resolved = bool(under_resolved),
        epsilon = f.epsilon,
    )

# -------------------------------------------------------------------------- #

def solve(f, p, cfg=None):
    """Relax then refine a seeded field"""

    if cfg is None:
        cfg = SolveConfig()
    relaxed, energies = relax(f, p, cfg.max_gradient_flow_steps, cfg, return_history=True)
    result = newton_refine(relaxed, p, cfg)
    result.energy_history = energies
    return result

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def solve_family(
    boundary,
    p,
    eps_list,
    cfg=None,
    domain=None,
    cells_per_eps=MW_conf.CELLS_PER_EPS,
    supplied=None,
):
    """Solve for a decreasing list of epsilon, warm-starting each member from the previous one

    Parameters
    ----------
    boundary : boundary spec (see boundary_values)
    p : Potential
    eps_list : strictly decreasing list of epsilon
    cfg : SolveConfig (default=SolveConfig())
    domain : shape spec {'shape': 'rectangle', 'bounds': ...} or {'shape': 'disk', ...}
             (default=unit square)
    cells_per_eps : grid rule h = eps / cells_per_eps (default=8)
    supplied : seed values for the first member with seed strategy 'supplied'

    Returns
    -------
    results : list of SolveResult; failed members carry a failure message and converged=False,
              every member carries the family bound M0 = max energy

    Examples
    --------
    results = solve_family('two-phase:0', gl_scalar(), [0.2, 0.1], domain={'shape': 'disk', 'center': [0, 0], 'radius': 1})
    """

    logger.debug(f'{locals()}')

    if cfg is None:
        cfg = SolveConfig()
    if domain is None:
        domain = {'shape': 'rectangle', 'bounds': [0.0, 1.0, 0.0, 1.0]}

    eps_list = [float(e) for e in eps_list]
    if not eps_list:
        logger.info('Empty eps_list, nothing to solve')
        return []
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])) or min(eps_list) <= 0.0:
        logger.error(f'eps_list must be positive and strictly decreasing, got {eps_list}')
        raise ValueError(f'eps_list must be positive and strictly decreasing, got {eps_list}')
    if cells_per_eps < MW_conf.MIN_CELLS_PER_EPS:
        logger.error(f'cells_per_eps must be at least {MW_conf.MIN_CELLS_PER_EPS}')
        raise ValueError(f'cells_per_eps must be at least {MW_conf.MIN_CELLS_PER_EPS}')

    results = []
    previous = None

    for eps in eps_list:
        grid = MW_gf.grid_from_spec(domain, eps / cells_per_eps)
        data = boundary_values(boundary, grid, p, eps)

        if previous is None:
            seed = initial_guess(grid, data, p, cfg.seed_strategy, supplied)
        else:
            X, Y = grid.XY
            points = np.column_stack([X.ravel(), Y.ravel()])
            seed = MW_gf.interpolate(previous.grid, previous.values, points).reshape(grid.shape + (p.k,))
            pinned = grid.active & ~grid.inside
            seed[pinned] = data[pinned]

        f = MW_gf.make_field(grid, seed, eps, 'dirichlet')
        logger.info(f'Solving member eps={eps:.4g} on {grid.nx}x{grid.ny} cells')

        try:
            result = solve(f, p, cfg)
            previous = result.field
        except (MW_err.BlowUp, MW_err.StagnationError, ValueError) as E:
            logger.warning(f'Member eps={eps:.4g} failed: {E}')
            result = SolveResult(
                field = f,
                residual_history = [],
                converged = False,
                energy = MW_fun.energy_on_region(f, p)[0],
                max_amplitude = _max_amplitude(f),
                failure = f'{type(E).__name__}: {E}',
            )
            if previous is None:
                previous = f

        result.epsilon = eps
        results.append(result)

    # family energy bound and branch flags
    M0 = max(r.energy for r in results)
    for n, r in enumerate(results):
        r.family_M0 = M0
        if n == 0:
            continue
        prev = results[n - 1].energy
        change = abs(r.energy - prev) / max(prev, 1e-8)
        if change > MW_conf.SOLVER_BRANCH_JUMP:
            r.branch_jump = True
            logger.warning(f'Possible branch jump at eps={r.epsilon:.4g}: relative energy change {change:.2f}')

    logger.info(f'Family of {len(results)} members, M0 = {M0:.6g}')
    return results

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def weak_form_residual(f, p, n_tests=10, seed=0):
    """Relative weak-form residual |int grad u : grad phi + eps^-2 grad V . phi| / scale

    Test functions are bumps times random trigonometric modes in random directions
    of R^k, supported in the largest centred disk of the domain.

    Returns
    -------
    worst : maximum relative residual over the test functions
    """

    grid = f.grid
    rng = np.random.default_rng(seed)
    c = grid.center
    r = 0.9 * float(MW_gf.distance_to_boundary(grid, [c])[0])

    X, Y = grid.XY
    dx = X - c[0]
    dy = Y - c[1]
    s2 = (dx**2 + dy**2) / r**2
    inside = s2 < 1.0
    b = np.zeros(grid.shape)
    b[inside] = np.exp(-1.0 / (1.0 - s2[inside]))
    factor = np.zeros(grid.shape)
    factor[inside] = b[inside] * (-2.0 / (1.0 - s2[inside])**2) / r**2

    w = MW_gf.node_weights(grid)
    grad_u = MW_gf.gradient(f)
    gV = p.grad(f.values) / f.epsilon**2
    gV[~grid.active] = 0.0

    worst = 0.0
    for _ in range(n_tests):
        wave = rng.uniform(-3.0, 3.0, size=2) / r
        phase = rng.uniform(0.0, 2.0 * np.pi)
        a = rng.normal(size=f.k)
        a /= np.linalg.norm(a)

        arg = wave[0] * dx + wave[1] * dy + phase
        g = np.cos(arg)
        phi_s = b * g
        dphi_s = np.stack([factor * dx * g - b * np.sin(arg) * wave[0],
                           factor * dy * g - b * np.sin(arg) * wave[1]], axis=-1)

        phi = phi_s[..., None] * a
        dphi = dphi_s[..., :, None] * a

        integrand = np.einsum('...ak,...ak->...', grad_u, dphi) + np.einsum('...k,...k->...', gV, phi)
        scale = np.sqrt(np.sum(grad_u**2, axis=(-2, -1))) * np.sqrt(np.sum(dphi**2, axis=(-2, -1))) \
            + np.linalg.norm(gV, axis=-1) * np.linalg.norm(phi, axis=-1)
        value = abs(float(np.sum(w * integrand))) / max(float(np.sum(w * scale)), 1e-300)
        worst = max(worst, value)

    logger.debug(f'weak form residual: {worst:.3e}')
    return worst

# -------------------------------------------------------------------------- #

def max_principle_check(result, p, c):
    """Uniform bound |u|^2 <= 4 C_unf E / dist(x, boundary) + 2 sup|s|^2 and sup|u| <= 2 (R0 + 1)

    Returns
    -------
    records : list of two CheckRecord (nodewise bound, soft amplitude bound)
    """

    f = result.field
    grid = f.grid
    X, Y = grid.XY
    dist = MW_gf.distance_to_boundary(grid, np.column_stack([X.ravel(), Y.ravel()])).reshape(grid.shape)
    keep = grid.active & (dist >= grid.h)

    norm2 = np.sum(f.values**2, axis=-1)
    sup_sigma2 = float(np.max(np.sum(p.sigma**2, axis=-1)))
    bound = 4.0 * c.c_unf * result.energy / np.maximum(dist, grid.h) + 2.0 * sup_sigma2
    ratio = float(np.max(norm2[keep] / bound[keep], initial=0.0))

    return [
        MW_rep.inequality_record('max_principle', ratio, 1.0, scale=1.0, details={'kind': 'uniform bound'}),
        MW_rep.inequality_record(
            'max_principle', result.max_amplitude, 2.0 * (p.R0 + 1.0), details={'kind': 'amplitude'},
        ),
    ]

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

# ---- End of <MW_solver.py> ----
