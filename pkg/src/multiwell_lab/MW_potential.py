# ---- This is <MW_potential.py> ----

"""
Multiwell potentials, their derivatives and derived structural constants
"""

from dataclasses import dataclass, field
from typing import Callable

from loguru import logger

import numpy as np

from scipy.integrate import trapezoid
from scipy.stats import norm, qmc

import multiwell_lab.MW_lab_config as MW_conf
import multiwell_lab.MW_errors as MW_err

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

@dataclass(frozen=True)
class Well:
    location: np.ndarray
    hess_min: float
    hess_max: float

# -------------------------------------------------------------------------- #

@dataclass(frozen=True)
class Potential:
    """Smooth nonnegative map R^k -> R with a finite set of wells

    Evaluators act on arrays of shape (..., k) and return (...),
    (..., k) and (..., k, k) respectively.
    """
    name: str
    k: int
    wells: tuple
    eval_fn: Callable = field(repr=False)
    grad_fn: Callable = field(repr=False)
    hess_fn: Callable = field(repr=False)
    alpha_inf: float = 1.0
    R_inf: float = 2.0
    exact_derivatives: bool = True
    spec: object = None

    def V(self, y):
        return self.eval_fn(np.asarray(y, dtype=float))

    def grad(self, y):
        return self.grad_fn(np.asarray(y, dtype=float))

    def hess(self, y):
        return self.hess_fn(np.asarray(y, dtype=float))

    @property
    def q(self):
        return len(self.wells)

    @property
    def sigma(self):
        return np.array([w.location for w in self.wells], dtype=float).reshape(self.q, self.k)

    @property
    def R0(self):
        return float(np.max(np.linalg.norm(self.sigma, axis=-1)))

# -------------------------------------------------------------------------- #

@dataclass(frozen=True)
class StructuralConstants:
    mu0: float
    lambda0: float
    lambda_max: float
    alpha0: float
    R0: float
    beta_inf: float
    beta_window: tuple = (0.0, 0.0)
    c_unf: float = 0.0
    shrink_rounds: int = 0

# -------------------------------------------------------------------------- #

@dataclass
class HypothesisCheck:
    name: str
    passed: bool
    witness: list = field(default_factory=list)
    detail: str = ''

@dataclass
class ValidationReport:
    potential: str
    passed: bool
    checks: list

    def __getitem__(self, name):
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

# -------------------------------------------------------------------------- #

@dataclass
class EnvelopeReport:
    max_violation: float
    n_samples: int
    per_well: list
    passed: bool

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def halton(d, n):
    """Deterministic Halton points in [0,1)^d (origin dropped)"""
    return qmc.Halton(d=d, scramble=False).random(n + 1)[1:]

# -------------------------------------------------------------------------- #

def unit_directions(k, n):
    """Deterministic unit vectors in R^k"""
    if k == 1:
        return np.where(halton(1, n)[:, 0] < 0.5, -1.0, 1.0)[:, None]
    g = norm.ppf(np.clip(halton(k, n), 1e-12, 1 - 1e-12))
    return g / np.maximum(np.linalg.norm(g, axis=-1, keepdims=True), 1e-300)

# -------------------------------------------------------------------------- #

def ball_samples(center, radius, n, r_min=0.0):
    """Deterministic samples in the shell r_min <= |y - center| <= radius"""
    center = np.atleast_1d(np.asarray(center, dtype=float))
    k = center.size
    h = halton(k + 1, n)
    if k == 1:
        dirs = np.where(h[:, 1] < 0.5, -1.0, 1.0)[:, None]
    else:
        g = norm.ppf(np.clip(h[:, 1:], 1e-12, 1 - 1e-12))
        dirs = g / np.maximum(np.linalg.norm(g, axis=-1, keepdims=True), 1e-300)
    # uniform in volume between r_min and radius
    lo = r_min ** k
    hi = radius ** k
    r = (lo + (hi - lo) * h[:, 0]) ** (1.0 / k)
    return center + r[:, None] * dirs

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def _fd_grad(eval_fn):

    def grad_fn(y):
        y = np.asarray(y, dtype=float)
        step = MW_conf.FD_STEP * (1.0 + np.linalg.norm(y, axis=-1))
        out = np.empty_like(y)
        for m in range(y.shape[-1]):
            e = np.zeros(y.shape[-1])
            e[m] = 1.0
            yp = y + step[..., None] * e
            ym = y - step[..., None] * e
            out[..., m] = (eval_fn(yp) - eval_fn(ym)) / (2.0 * step)
        return out

    return grad_fn

def _fd_hess(grad_fn):

    def hess_fn(y):
        y = np.asarray(y, dtype=float)
        k = y.shape[-1]
        step = MW_conf.FD_STEP * (1.0 + np.linalg.norm(y, axis=-1))
        out = np.empty(y.shape + (k,))
        for m in range(k):
            e = np.zeros(k)
            e[m] = 1.0
            gp = grad_fn(y + step[..., None] * e)
            gm = grad_fn(y - step[..., None] * e)
            out[..., :, m] = (gp - gm) / (2.0 * step[..., None])
        return 0.5 * (out + np.swapaxes(out, -1, -2))

    return hess_fn

# -------------------------------------------------------------------------- #

def make_potential(
    name,
    k,
    wells,
    V,
    grad=None,
    hess=None,
    alpha_inf=1.0,
    R_inf=2.0,
    spec=None,
):
    """Build a Potential from evaluators

    Parameters
    ----------
    name : potential name
    k : codomain dimension
    wells : list of well locations (each of length k)
    V : vectorized evaluator (..., k) -> (...)
    grad : gradient evaluator (default: central differences)
    hess : Hessian evaluator (default: central differences of grad)
    alpha_inf : growth coefficient at infinity
    R_inf : radius beyond which the growth condition holds
    spec : serializable description used to rebuild the potential

    Returns
    -------
    p : Potential

    Examples
    --------
    p = make_potential('quartic', 1, [[-1.0], [1.0]], lambda y: (1 - y[..., 0]**2)**2 / 4)
    """

    exact = grad is not None and hess is not None

    if grad is None:
        logger.debug(f'{name}: gradient filled by central differences')
        grad = _fd_grad(V)
    if hess is None:
        logger.debug(f'{name}: Hessian filled by central differences')
        hess = _fd_hess(grad)

    well_list = []
    for location in wells:
        location = np.asarray(location, dtype=float).reshape(k)
        eig = np.linalg.eigvalsh(np.asarray(hess(location[None, :]))[0])
        well_list.append(Well(location=location, hess_min=float(eig[0]), hess_max=float(eig[-1])))

    return Potential(
        name = name,
        k = k,
        wells = tuple(well_list),
        eval_fn = V,
        grad_fn = grad,
        hess_fn = hess,
        alpha_inf = float(alpha_inf),
        R_inf = float(R_inf),
        exact_derivatives = exact,
        spec = spec if spec is not None else name,
    )

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def gl_scalar():
    """Scalar Ginzburg-Landau potential V(u) = (1-u^2)^2/4"""

    def V(y):
        u = y[..., 0]
        return 0.25 * (1.0 - u**2)**2

    def grad(y):
        u = y[..., 0]
        return (u**3 - u)[..., None]

    def hess(y):
        u = y[..., 0]
        return (3.0 * u**2 - 1.0)[..., None, None]

    return make_potential('gl-scalar', 1, [[-1.0], [1.0]], V, grad, hess, alpha_inf=1.0, R_inf=2.0)

# -------------------------------------------------------------------------- #

def triple_well_2d():
    """Triple-well potential V(u) = 1/2 prod |u - s_i|^2 on the cube roots of unity"""

    angles = 2.0 * np.pi * np.arange(3) / 3.0
    s = np.stack([np.cos(angles), np.sin(angles)], axis=-1)

    def V(y):
        d = np.sum((y[..., None, :] - s)**2, axis=-1)
        return 0.5 * np.prod(d, axis=-1)

    def grad(y):
        diff = y[..., None, :] - s
        d = np.sum(diff**2, axis=-1)
        out = np.zeros(y.shape)
        for i in range(3):
            others = np.prod(np.delete(d, i, axis=-1), axis=-1)
            out += diff[..., i, :] * others[..., None]
        return out

    def hess(y):
        diff = y[..., None, :] - s
        d = np.sum(diff**2, axis=-1)
        out = np.zeros(y.shape + (2,))
        eye = np.eye(2)
        for i in range(3):
            out += np.prod(np.delete(d, i, axis=-1), axis=-1)[..., None, None] * eye
            for j in range(3):
                if j == i:
                    continue
                rest = d[..., 3 - i - j]
                out += 2.0 * diff[..., i, :, None] * diff[..., j, None, :] * rest[..., None, None]
        return out

    return make_potential('triple-well-2d', 2, s, V, grad, hess, alpha_inf=1.0, R_inf=2.0)

# -------------------------------------------------------------------------- #

def polynomial_potential(block):
    """Polynomial potential from a JSON block

    Parameters
    ----------
    block : dict with keys 'k', 'terms' (list of {'coef', 'powers'} or
            [coef, powers] pairs), 'wells', optional 'alpha_inf', 'R_inf', 'name'

    Returns
    -------
    p : Potential with exact derivatives
    """

    try:
        k = int(block['k'])
        terms = block['terms']
        wells = block['wells']
    except KeyError as E:
        logger.error(f'Polynomial potential block misses key: {E}')
        raise MW_err.ConfigError(f'Polynomial potential block misses key: {E}')

    coefs = []
    powers = []
    for term in terms:
        if isinstance(term, dict):
            coefs.append(float(term['coef']))
            powers.append([int(p) for p in term['powers']])
        else:
            coefs.append(float(term[0]))
            powers.append([int(p) for p in term[1]])
    coefs = np.array(coefs)
    powers = np.array(powers, dtype=int).reshape(len(coefs), k)

    if np.any(powers < 0):
        logger.error('Polynomial powers must be nonnegative')
        raise MW_err.ConfigError('Polynomial powers must be nonnegative')

    def monomial(y, p):
        return np.prod(y ** p, axis=-1)

    def V(y):
        out = np.zeros(y.shape[:-1])
        for c, p in zip(coefs, powers):
            out += c * monomial(y, p)
        return out

    def grad(y):
        out = np.zeros(y.shape)
        for c, p in zip(coefs, powers):
            for m in range(k):
                if p[m] == 0:
                    continue
                pm = p.copy()
                pm[m] -= 1
                out[..., m] += c * p[m] * monomial(y, pm)
        return out

    def hess(y):
        out = np.zeros(y.shape + (k,))
        for c, p in zip(coefs, powers):
            for m in range(k):
                for n in range(k):
                    pmn = p.copy()
                    factor = pmn[m]
                    pmn[m] -= 1
                    factor *= pmn[n]
                    pmn[n] -= 1
                    if factor == 0:
                        continue
                    out[..., m, n] += c * factor * monomial(y, pmn)
        return out

    return make_potential(
        block.get('name', 'polynomial'),
        k,
        wells,
        V,
        grad,
        hess,
        alpha_inf = block.get('alpha_inf', 1.0),
        R_inf = block.get('R_inf', 2.0),
        spec = dict(block),
    )

# -------------------------------------------------------------------------- #

BUILTIN_POTENTIALS = {
    'gl-scalar': gl_scalar,
    'triple-well-2d': triple_well_2d,
}

def get_potential(spec):
    """Return a potential from a registry name or a polynomial block"""

    if isinstance(spec, dict):
        return polynomial_potential(spec)

    if spec not in BUILTIN_POTENTIALS:
        logger.error(f'{spec} is not a valid choice for potential')
        raise MW_err.ConfigError(f'{spec} is not a valid choice for potential')

    return BUILTIN_POTENTIALS[spec]()

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def validate_hypotheses(p, sample_budget=MW_conf.POTENTIAL_SAMPLE_BUDGET):
    """Check the structural hypotheses H1-H3 on a potential

    Parameters
    ----------
    p : Potential
    sample_budget : total number of sample points (>= 1000)

    Returns
    -------
    report : ValidationReport with one HypothesisCheck per hypothesis

    Examples
    --------
    report = validate_hypotheses(gl_scalar())
    report.passed
    """

    logger.info(f'Validating hypotheses of potential {p.name}')

    if sample_budget < MW_conf.POTENTIAL_MIN_SAMPLE_BUDGET:
        logger.error(f'sample_budget must be at least {MW_conf.POTENTIAL_MIN_SAMPLE_BUDGET}')
        raise ValueError(f'sample_budget must be at least {MW_conf.POTENTIAL_MIN_SAMPLE_BUDGET}')

    sigma = p.sigma
    R0 = p.R0
    box = 4.0 * max(p.R_inf, 2.0 * R0, 1.0)
    n_box = sample_budget // 2
    n_radial = sample_budget - n_box

    logger.debug(f'q:     {p.q}')
    logger.debug(f'R0:    {R0}')
    logger.debug(f'box:   {box}')

    # finite evaluations on the sampling box
    y_box = box * (2.0 * halton(p.k, n_box) - 1.0)
    v_box = p.V(y_box)
    g_box = p.grad(y_box)
    if not (np.all(np.isfinite(v_box)) and np.all(np.isfinite(g_box))):
        bad = y_box[~np.isfinite(v_box) | ~np.all(np.isfinite(g_box), axis=-1)][0]
        logger.error(f'Non-finite potential evaluation at {bad}')
        raise MW_err.NonFiniteEvaluation(f'Non-finite potential evaluation at {bad}')

    # wells must be critical points
    g_wells = p.grad(sigma)
    for i, g in enumerate(g_wells):
        if np.linalg.norm(g) > MW_conf.WELL_CRITICAL_TOL * (1.0 + np.linalg.norm(sigma[i])):
            logger.error(f'Well {i} at {sigma[i]} is not a critical point: |grad V| = {np.linalg.norm(g)}')
            raise MW_err.WellNotCritical(f'Well {i} at {sigma[i]} is not a critical point')

    checks = []

    # H1: finite vacuum manifold with at least two wells, V >= 0, zero exactly on wells
    v_wells = p.V(sigma)
    dist_box = np.min(np.linalg.norm(y_box[:, None, :] - sigma[None, :, :], axis=-1), axis=-1)
    away = dist_box > 1e-3
    witness = []
    if np.min(v_box) < -1e-12:
        witness.append(y_box[np.argmin(v_box)].tolist())
    if np.any(away & (v_box <= 0.0)):
        witness.append(y_box[away & (v_box <= 0.0)][0].tolist())
    h1_ok = p.q >= 2 and bool(np.all(np.abs(v_wells) <= 1e-10)) and not witness
    detail = f'q={p.q}, max|V(sigma)|={float(np.max(np.abs(v_wells)))}'
    checks.append(HypothesisCheck('H1', h1_ok, witness, detail))

    # H2: positive definite Hessian at the wells
    eig_min = [w.hess_min for w in p.wells]
    h2_ok = bool(np.all(np.array(eig_min) > 0.0))
    witness = [p.wells[i].location.tolist() for i in range(p.q) if eig_min[i] <= 0.0]
    checks.append(HypothesisCheck('H2', h2_ok, witness, f'hess_min={eig_min}'))

    # H3: growth condition on radial samples
    n_dirs = max(1, n_radial // 64)
    dirs = unit_directions(p.k, n_dirs)
    radii = np.linspace(p.R_inf * (1.0 + 1e-6), 4.0 * max(p.R_inf, 2.0 * R0), 64)
    y_rad = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, p.k)
    lhs = np.sum(y_rad * p.grad(y_rad), axis=-1)
    rhs = p.alpha_inf * np.sum(y_rad**2, axis=-1)
    bad = lhs < rhs - 1e-9 * rhs
    h3_ok = not bool(np.any(bad))
    witness = y_rad[bad][:5].tolist()
    checks.append(HypothesisCheck('H3', h3_ok, witness, f'{int(np.sum(bad))} radial violations'))

    for check in checks:
        if check.passed:
            logger.debug(f'{check.name}: pass ({check.detail})')
        else:
            logger.warning(f'{check.name}: fail ({check.detail})')

    return ValidationReport(p.name, all(c.passed for c in checks), checks)

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def structural_checks(p, mu0, n_samples=MW_conf.SANDWICH_SAMPLES_PER_WELL):
    """Sampled Hessian sandwich on B(s_i, 2 mu0) and potential floor away from the wells

    The floor V >= lambda0 mu0^2 / 2 is sampled outside the balls B(s_i, sqrt(2) mu0).
    """

    sigma = p.sigma
    lambda0 = min(w.hess_min for w in p.wells)
    alpha0 = 0.5 * lambda0 * mu0**2

    # Hessian sandwich
    sandwich_ok = True
    worst = np.inf
    for w in p.wells:
        y = ball_samples(w.location, 2.0 * mu0, n_samples)
        eig = np.linalg.eigvalsh(p.hess(y))
        low = eig[:, 0] - 0.5 * w.hess_min
        high = 2.0 * w.hess_max - eig[:, -1]
        worst = min(worst, float(np.min(low)), float(np.min(high)))
        if np.any(low < -1e-12) or np.any(high < -1e-12):
            sandwich_ok = False

    # potential floor on the sampled complement
    half = max(2.0 * p.R0, p.R_inf) + 1.0
    y = [half * (2.0 * halton(p.k, 2 * n_samples) - 1.0)]
    for w in p.wells:
        y.append(ball_samples(w.location, 4.0 * mu0, n_samples, r_min=np.sqrt(2.0) * mu0))
    y = np.concatenate(y, axis=0)
    dist = np.min(np.linalg.norm(y[:, None, :] - sigma[None, :, :], axis=-1), axis=-1)
    y = y[dist >= np.sqrt(2.0) * mu0 * (1.0 - 1e-12)]
    v = p.V(y)
    v_min = float(np.min(v)) if v.size else np.inf
    extrut_ok = bool(v_min >= alpha0 * (1.0 - 1e-12))

    # disjointness of the balls B(s_i, 2 mu0)
    disjoint = True
    for i in range(p.q):
        for j in range(i + 1, p.q):
            if np.linalg.norm(sigma[i] - sigma[j]) < 4.0 * mu0 * (1.0 - 1e-12):
                disjoint = False

    return {
        'sandwich': sandwich_ok,
        'sandwich_margin': worst,
        'extrut': extrut_ok,
        'extrut_min': v_min,
        'alpha0': alpha0,
        'disjoint': disjoint,
    }

# -------------------------------------------------------------------------- #

def _beta_inf(p):

    R0 = p.R0
    r_far = max(8.0 * R0, p.R_inf)
    window = (2.0 * R0, 1.5 * r_far)
    dirs = unit_directions(p.k, 256 if p.k > 1 else 2)
    radii = np.linspace(window[0], window[1], 128)
    y = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, p.k)
    ratio = p.V(y) / np.sum(y**2, axis=-1)
    beta = min(float(np.min(ratio)), 0.25 * p.alpha_inf)
    return beta, window

# -------------------------------------------------------------------------- #

def constants_from_mu0(p, mu0, shrink_rounds=0):
    """Structural constants for a prescribed well-separation radius mu0"""

    lambda0 = min(w.hess_min for w in p.wells)
    lambda_max = max(w.hess_max for w in p.wells)
    beta, window = _beta_inf(p)

    return StructuralConstants(
        mu0 = float(mu0),
        lambda0 = float(lambda0),
        lambda_max = float(lambda_max),
        alpha0 = 0.5 * lambda0 * mu0**2,
        R0 = p.R0,
        beta_inf = beta,
        beta_window = window,
        c_unf = float(np.sqrt(4.0 / np.sqrt(lambda0) + 2.0 / lambda0)),
        shrink_rounds = shrink_rounds,
    )

# -------------------------------------------------------------------------- #

def derive_constants(
    p,
    shrink_factor=MW_conf.SHRINK_FACTOR,
    n_samples=MW_conf.SANDWICH_SAMPLES_PER_WELL,
    validate=True,
):
    """Derive mu0, lambda0, alpha0, R0 and beta_inf by sampled verification

    Parameters
    ----------
    p : Potential
    shrink_factor : factor in (0,1) applied to mu0 after a failed round (default=0.5)
    n_samples : samples per well for the Hessian sandwich (default=2048)
    validate : run validate_hypotheses first (default=True)

    Returns
    -------
    c : StructuralConstants

    Examples
    --------
    c = derive_constants(gl_scalar())
    c.lambda0
    """

    logger.info(f'Deriving structural constants for {p.name}')

    if not 0.0 < shrink_factor < 1.0:
        logger.error('shrink_factor must be in (0,1)')
        raise ValueError('shrink_factor must be in (0,1)')

    if validate:
        report = validate_hypotheses(p)
        if not report.passed:
            failed = [c.name for c in report.checks if not c.passed]
            logger.error(f'Potential {p.name} fails hypotheses {failed}')
            raise ValueError(f'Potential {p.name} fails hypotheses {failed}')

    sigma = p.sigma
    d_min = min(
        np.linalg.norm(sigma[i] - sigma[j])
        for i in range(p.q) for j in range(i + 1, p.q)
    )

    mu0 = 0.25 * d_min
    rounds = 0
    while True:
        checks = structural_checks(p, mu0, n_samples)
        logger.debug(f'mu0={mu0:.6g} sandwich={checks["sandwich"]} extrut={checks["extrut"]}')
        if checks['sandwich'] and checks['extrut'] and checks['disjoint']:
            break
        mu0 *= shrink_factor
        rounds += 1
        if mu0 < MW_conf.SHRINK_UNDERFLOW * d_min:
            logger.error(f'mu0 underflow for potential {p.name} after {rounds} rounds')
            raise MW_err.ShrinkExhausted(f'mu0 underflow for potential {p.name} after {rounds} rounds')

    c = constants_from_mu0(p, mu0, shrink_rounds=rounds)

    logger.debug(f'mu0:        {c.mu0}')
    logger.debug(f'lambda0:    {c.lambda0}')
    logger.debug(f'lambda_max: {c.lambda_max}')
    logger.debug(f'alpha0:     {c.alpha0}')
    logger.debug(f'R0:         {c.R0}')
    logger.debug(f'beta_inf:   {c.beta_inf} on {c.beta_window}')

    return c

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def nearest_well(p, c, y):
    """Nearest well to y and whether the quadratic distance bound is certified

    Parameters
    ----------
    p : Potential
    c : StructuralConstants
    y : point in R^k

    Returns
    -------
    index : index of the nearest well
    distance : distance to that well
    certified : True iff V(y) < alpha0 and distance <= sqrt(4 V(y) / lambda0)
    """

    y = np.atleast_1d(np.asarray(y, dtype=float)).reshape(p.k)
    dist = np.linalg.norm(p.sigma - y, axis=-1)
    index = int(np.argmin(dist))
    distance = float(dist[index])
    v = float(p.V(y[None, :])[0])

    certified = v < c.alpha0
    if certified and distance > np.sqrt(4.0 * v / c.lambda0) + 1e-12:
        logger.warning(f'distance bound fails at y={y.tolist()}: {distance} > {np.sqrt(4.0 * v / c.lambda0)}')
        certified = False

    return index, distance, bool(certified)

# -------------------------------------------------------------------------- #

def nearest_well_field(p, values):
    """Vectorized nearest-well index and distance for an array of shape (..., k)"""
    dist = np.linalg.norm(values[..., None, :] - p.sigma, axis=-1)
    index = np.argmin(dist, axis=-1)
    return index, np.take_along_axis(dist, index[..., None], axis=-1)[..., 0]

# -------------------------------------------------------------------------- #

def quadratic_envelope_check(p, c, samples=4096):
    """Check the quadratic envelopes of V and of grad V . (y - s_i) on B(s_i, 2 mu0)"""

    max_violation = 0.0
    per_well = []

    for i, w in enumerate(p.wells):
        y = ball_samples(w.location, 2.0 * c.mu0, samples)
        d2 = np.sum((y - w.location)**2, axis=-1)
        v = p.V(y)
        g = np.sum(p.grad(y) * (y - w.location), axis=-1)
        violation = np.max(np.stack([
            0.25 * w.hess_min * d2 - v,
            v - w.hess_max * d2,
            0.5 * w.hess_min * d2 - g,
            g - 2.0 * w.hess_max * d2,
        ]), axis=0)
        worst = max(0.0, float(np.max(violation)))
        per_well.append({'well': i, 'max_violation': worst, 'n_violations': int(np.sum(violation > 1e-12))})
        max_violation = max(max_violation, worst)

    passed = max_violation <= MW_conf.CHECK_TOLERANCES['quadratic_envelope']
    if not passed:
        logger.warning(f'quadratic envelope violated by {max_violation}: mu0 may be too large')

    return EnvelopeReport(max_violation, samples * p.q, per_well, passed)

# -------------------------------------------------------------------------- #

def segment_transition_cost(p, i, j, n=2001):
    """Integral of sqrt(2V) along the straight segment from well i to well j"""

    a = p.wells[i].location
    b = p.wells[j].location
    t = np.linspace(0.0, 1.0, n)
    y = a + t[:, None] * (b - a)
    integrand = np.sqrt(2.0 * np.maximum(p.V(y), 0.0)) * np.linalg.norm(b - a)
    return float(trapezoid(integrand, t))

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

# ---- End of <MW_potential.py> ----
