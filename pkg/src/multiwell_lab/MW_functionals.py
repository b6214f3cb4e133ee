# ---- This is <MW_functionals.py> ----

"""
Pointwise and integral diagnostics of gridded fields: energy, discrepancy,
Hopf differential, stress-energy tensor, Pohozaev and monotonicity identities,
Modica-Mortola maps
"""

from dataclasses import dataclass, field

from loguru import logger

import numpy as np

import multiwell_lab.MW_lab_config as MW_conf
import multiwell_lab.MW_grid_field as MW_gf
import multiwell_lab.MW_reports as MW_rep

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

@dataclass
class EnergyDensity:
    e: np.ndarray
    v: np.ndarray
    j: np.ndarray
    xi: np.ndarray
    grad_sq: np.ndarray

@dataclass
class HopfField:
    omega_re: np.ndarray
    omega_im: np.ndarray

@dataclass
class StressTensor:
    A: np.ndarray
    T: np.ndarray

@dataclass
class TestField:
    name: str
    X: np.ndarray
    DX: np.ndarray

@dataclass
class StressResidual:
    name: str
    real: float
    complex: float
    scale: float

@dataclass
class PohozaevResult:
    lhs: float
    rhs: float
    residual: float

@dataclass
class MonotonicityTable:
    radii: np.ndarray
    energy: np.ndarray
    ratio: np.ndarray
    derivative: np.ndarray
    xi_integral: np.ndarray
    radial_term: np.ndarray
    identity_rhs: np.ndarray
    records: list = field(default_factory=list)

@dataclass
class ModicaMortolaMap:
    well: int
    w: np.ndarray
    grad_w2: np.ndarray
    bound: np.ndarray
    violation_fraction: float
    records: list = field(default_factory=list)

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def energy_density(f, p, grad=None):
    """Energy density e, potential density v = V/eps, J = |grad u| sqrt(V) and discrepancy xi"""

    if grad is None:
        grad = MW_gf.gradient(f)

    eps = f.epsilon
    grad_sq = np.sum(grad**2, axis=(-2, -1))
    V = np.maximum(p.V(f.values), 0.0)

    kinetic = 0.5 * eps * grad_sq
    v = V / eps
    e = kinetic + v
    j = np.sqrt(grad_sq) * np.sqrt(V)
    xi = v - kinetic

    outside = ~f.grid.active
    for arr in (e, v, j, xi, grad_sq):
        arr[outside] = 0.0

    return EnergyDensity(e=e, v=v, j=j, xi=xi, grad_sq=grad_sq)

# -------------------------------------------------------------------------- #

def discrepancy_field(f, p):
    """Discrepancy xi = V/eps - eps |grad u|^2 / 2 (returned inside an EnergyDensity)"""
    return energy_density(f, p)

# -------------------------------------------------------------------------- #

def energy_on_region(f, p, region=None, density=None, subsamples=MW_conf.COVERAGE_SUBSAMPLES, clip=False):
    """Energy E and potential mass V/eps integrated over a region

    Parameters
    ----------
    f : Field
    p : Potential
    region : DiskSpec, annulus dict, boolean mask or None for the whole domain
    density : precomputed EnergyDensity (optional)
    subsamples : sub-samples per axis for partially covered cells (default=2)
    clip : restrict the region to the domain instead of raising (default=False)

    Returns
    -------
    E : energy on the region
    V_mass : integral of V(u)/eps on the region

    Examples
    --------
    E, V_mass = energy_on_region(f, p, DiskSpec((0.5, 0.5), 0.25))
    """

    if density is None:
        density = energy_density(f, p)

    if region is None:
        w = MW_gf.node_weights(f.grid)
    else:
        w = MW_gf.region_weights(f.grid, region, clip=clip, subsamples=subsamples)

    return float(np.sum(w * density.e)), float(np.sum(w * density.v))

# -------------------------------------------------------------------------- #

def interior_discrepancy_min(f, p, margin=None):
    """Minimum of xi over nodes at distance >= margin (default 4 eps) from the boundary"""

    if margin is None:
        margin = 4.0 * f.epsilon

    X, Y = f.grid.XY
    dist = MW_gf.distance_to_boundary(f.grid, np.column_stack([X.ravel(), Y.ravel()])).reshape(f.grid.shape)
    keep = f.grid.active & (dist >= margin)
    if not np.any(keep):
        logger.warning(f'No node at distance {margin} from the boundary')
        return 0.0

    return float(np.min(discrepancy_field(f, p).xi[keep]))

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def hopf_differential(f, grad=None):
    """Hopf differential omega = eps (|u_x1|^2 - |u_x2|^2 - 2i u_x1 . u_x2)"""

    if grad is None:
        grad = MW_gf.gradient(f)

    eps = f.epsilon
    a = np.sum(grad[..., 0, :]**2, axis=-1)
    b = np.sum(grad[..., 1, :]**2, axis=-1)
    c = np.sum(grad[..., 0, :] * grad[..., 1, :], axis=-1)

    return HopfField(omega_re=eps * (a - b), omega_im=-2.0 * eps * c)

# -------------------------------------------------------------------------- #

def stress_tensor(f, p, grad=None):
    """Stress-energy tensor A = e Id - eps du_i . du_j and its traceless part T"""

    if grad is None:
        grad = MW_gf.gradient(f)

    eps = f.epsilon
    a = np.sum(grad[..., 0, :]**2, axis=-1)
    b = np.sum(grad[..., 1, :]**2, axis=-1)
    c = np.sum(grad[..., 0, :] * grad[..., 1, :], axis=-1)
    v = np.maximum(p.V(f.values), 0.0) / eps

    t11 = 0.5 * eps * (b - a)
    t12 = -eps * c
    T = np.empty(f.grid.shape + (2, 2))
    T[..., 0, 0] = t11
    T[..., 1, 1] = -t11
    T[..., 0, 1] = t12
    T[..., 1, 0] = t12

    A = T.copy()
    A[..., 0, 0] += v
    A[..., 1, 1] += v

    outside = ~f.grid.active
    A[outside] = 0.0
    T[outside] = 0.0

    return StressTensor(A=A, T=T)

# -------------------------------------------------------------------------- #

def bump_test_fields(grid, x0, r):
    """The five compactly supported test vector fields on D(x0, r)

    Translations along x1 and x2, dilation, rotation and shear, each
    multiplied by the bump exp(-1 / (1 - |x - x0|^2 / r^2)).

    Returns
    -------
    fields : list of TestField with X of shape (..., 2) and DX[..., i, j] = dX_i/dx_j
    """

    X, Y = grid.XY
    dx = X - x0[0]
    dy = Y - x0[1]
    s2 = (dx**2 + dy**2) / r**2
    inside = s2 < 1.0

    b = np.zeros(grid.shape)
    b[inside] = np.exp(-1.0 / (1.0 - s2[inside]))
    # grad b = b * (-2 / (1 - s^2)^2) * (x - x0) / r^2
    factor = np.zeros(grid.shape)
    factor[inside] = b[inside] * (-2.0 / (1.0 - s2[inside])**2) / r**2
    bx = factor * dx
    by = factor * dy

    zero = np.zeros(grid.shape)

    def pack(name, X1, X2, d11, d12, d21, d22):
        Xv = np.stack([X1, X2], axis=-1)
        DX = np.stack([np.stack([d11, d12], axis=-1), np.stack([d21, d22], axis=-1)], axis=-2)
        return TestField(name, Xv, DX)

    return [
        pack('translation-x1', b, zero, bx, by, zero, zero),
        pack('translation-x2', zero, b, zero, zero, bx, by),
        pack('dilation', b * dx, b * dy, b + bx * dx, by * dx, bx * dy, b + by * dy),
        pack('rotation', -b * dy, b * dx, -bx * dy, -(b + by * dy), b + bx * dx, by * dx),
        pack('shear', b * dy, zero, bx * dy, b + by * dy, zero, zero),
    ]

# -------------------------------------------------------------------------- #

def stress_divergence_residual(f, p, X, grad=None):
    """Weak stress identity residuals for one test field

    real    = sum A_ij dX_i/dx_j
    complex = (1/eps) sum V div X - sum Re(omega dX/dzbar), with dX/dzbar = (d1 + i d2) X / 2

    Both vanish for exact solutions and coincide algebraically.
    """

    if grad is None:
        grad = MW_gf.gradient(f)

    w = MW_gf.node_weights(f.grid)
    stress = stress_tensor(f, p, grad)
    hopf = hopf_differential(f, grad)
    DX = X.DX

    real = float(np.sum(w * np.einsum('...ij,...ij->...', stress.A, DX)))

    div = DX[..., 0, 0] + DX[..., 1, 1]
    dzbar_re = 0.5 * (DX[..., 0, 0] - DX[..., 1, 1])
    dzbar_im = 0.5 * (DX[..., 0, 1] + DX[..., 1, 0])
    re_part = hopf.omega_re * dzbar_re - hopf.omega_im * dzbar_im
    v = np.maximum(p.V(f.values), 0.0) / f.epsilon
    complex_form = float(np.sum(w * (v * div - re_part)))

    density = energy_density(f, p, grad)
    scale = float(np.sum(w * density.e * np.sqrt(np.sum(DX**2, axis=(-2, -1)))))

    return StressResidual(X.name, real, complex_form, scale)

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def pohozaev_residual(f, p, d, subsamples=MW_conf.COVERAGE_SUBSAMPLES_FINE, grad=None):
    """Pohozaev identity on a disk

    lhs = eps^-2 int_D V(u)
    rhs = (r/4) int_circle (|du/dtau|^2 - |du/dr|^2 + 2 eps^-2 V(u))
    """

    eps = f.epsilon
    if grad is None:
        grad = MW_gf.gradient(f)

    samples = MW_gf.restrict_circle(f, d, grad=grad)
    w = MW_gf.region_weights(f.grid, d, subsamples=subsamples)
    V = np.maximum(p.V(f.values), 0.0)

    lhs = float(np.sum(w * V)) / eps**2
    V_circle = np.maximum(p.V(samples.values), 0.0)
    integrand = np.sum(samples.d_tau**2, axis=-1) - np.sum(samples.d_r**2, axis=-1) + 2.0 * V_circle / eps**2
    rhs = 0.25 * d.radius * float(np.sum(integrand)) * samples.weight

    return PohozaevResult(lhs=lhs, rhs=rhs, residual=lhs - rhs)

# -------------------------------------------------------------------------- #

def circle_energy(samples, p):
    """Line integral of e over sampled circle"""
    eps = samples.epsilon
    grad_sq = np.sum(samples.d_tau**2, axis=-1) + np.sum(samples.d_r**2, axis=-1)
    e = 0.5 * eps * grad_sq + np.maximum(p.V(samples.values), 0.0) / eps
    return float(np.sum(e)) * samples.weight

# -------------------------------------------------------------------------- #

def pohozaev_inequality_check(f, p, d, tolerance=None):
    """Check eps^-1 int_D V <= (r/2) int_circle e"""

    samples = MW_gf.restrict_circle(f, d)
    w = MW_gf.region_weights(f.grid, d, subsamples=MW_conf.COVERAGE_SUBSAMPLES_FINE)
    lhs = float(np.sum(w * np.maximum(p.V(f.values), 0.0))) / f.epsilon
    rhs = 0.5 * d.radius * circle_energy(samples, p)

    return MW_rep.inequality_record(
        'pohozaev_inequality',
        lhs,
        rhs,
        scale = max(rhs, lhs, 1e-12),
        tolerance = tolerance,
        region = {'center': list(d.center), 'radius': d.radius},
    )

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def monotonicity_profile(f, p, x0, radii, subsamples=MW_conf.COVERAGE_SUBSAMPLES_FINE):
    """Table r -> E(r)/r with the terms of d/dr(E/r) = r^-2 int xi + (eps/r) int_circle |u_r|^2

    Parameters
    ----------
    f : Field
    p : Potential
    x0 : disk center
    radii : increasing list of radii (at least 3), all disks in the domain

    Returns
    -------
    table : MonotonicityTable with a monotonicity record and an identity record
    """

    radii = np.asarray(radii, dtype=float)
    if radii.size < 3 or np.any(np.diff(radii) <= 0):
        logger.error('monotonicity_profile needs at least three increasing radii')
        raise ValueError('monotonicity_profile needs at least three increasing radii')

    grad = MW_gf.gradient(f)
    density = energy_density(f, p, grad)

    energy = np.zeros(radii.size)
    xi_int = np.zeros(radii.size)
    radial = np.zeros(radii.size)

    for n, r in enumerate(radii):
        d = MW_gf.DiskSpec(tuple(x0), r)
        w = MW_gf.region_weights(f.grid, d, subsamples=subsamples)
        energy[n] = np.sum(w * density.e)
        xi_int[n] = np.sum(w * density.xi)
        samples = MW_gf.restrict_circle(f, d, grad=grad)
        radial[n] = f.epsilon / r * np.sum(samples.d_r**2) * samples.weight

    ratio = energy / radii
    derivative = np.gradient(ratio, radii)
    rhs = xi_int / radii**2 + radial

    scale = max(float(np.max(np.abs(rhs))), float(np.max(ratio)) / radii[-1], 1e-12)
    records = [
        MW_rep.inequality_record(
            'monotonicity',
            -float(np.min(derivative)),
            0.0,
            scale = scale,
            region = {'center': list(x0), 'radii': radii.tolist()},
        ),
    ]

    interior = slice(1, -1)
    mismatch = float(np.max(np.abs(derivative[interior] - rhs[interior])))
    records.append(MW_rep.inequality_record(
        'monotonicity',
        mismatch,
        0.0,
        scale = max(float(np.max(np.abs(rhs[interior]))), 1e-12),
        region = {'center': list(x0), 'radii': radii.tolist()},
        details = {'kind': 'identity'},
    ))

    return MonotonicityTable(radii, energy, ratio, derivative, xi_int, radial, rhs, records)

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

_plateau_logged = False

def plateau(t, mu0):
    """C1 plateau: t on [0, mu0/2], quadratic blend on [mu0/2, mu0], 3 mu0/4 beyond"""

    global _plateau_logged
    if not _plateau_logged:
        logger.info('plateau constant 3 mu0/4 used beyond mu0 (the alternative 5 mu0/4 is inconsistent)')
        _plateau_logged = True

    t = np.asarray(t, dtype=float)
    half = 0.5 * mu0
    s = np.clip((t - half) / half, 0.0, 1.0)
    blend = half + half * (s - 0.5 * s**2)
    return np.where(t <= half, t, np.where(t >= mu0, 0.75 * mu0, blend))

# -------------------------------------------------------------------------- #

def modica_mortola_map(f, p, c, i, node_tolerance=0.05):
    """Scalar map w_i = plateau(|u - s_i|) and the check |grad w_i^2| <= 4 lambda0^-1/2 J(u)

    Returns
    -------
    mm : ModicaMortolaMap with the fraction of violating nodes and check records
    """

    if not 0 <= i < p.q:
        logger.error(f'well index {i} out of range for {p.q} wells')
        raise ValueError(f'well index {i} out of range for {p.q} wells')

    dist = np.linalg.norm(f.values - p.wells[i].location, axis=-1)
    w = plateau(dist, c.mu0)

    w2 = MW_gf.Field(f.grid, (w**2)[..., None], f.epsilon, f.bc)
    grad_w2 = np.linalg.norm(MW_gf.gradient(w2)[..., 0], axis=-1)

    density = energy_density(f, p)
    bound = 4.0 / np.sqrt(c.lambda0) * density.j

    active = f.grid.active
    violating = active & (grad_w2 > (1.0 + node_tolerance) * bound + 1e-12)
    fraction = float(np.sum(violating)) / max(int(np.sum(active)), 1)

    # plateau properties
    near = active & (dist <= 0.5 * c.mu0)
    far = active & (dist >= c.mu0)
    prop_error = max(
        float(np.max(np.abs(w[near] - dist[near]), initial=0.0)),
        float(np.max(np.abs(w[far] - 0.75 * c.mu0), initial=0.0)),
        float(np.max(w[active], initial=0.0)) - 0.75 * c.mu0,
    )

    records = [
        MW_rep.inequality_record('modica_mortola', fraction, 0.0, scale=1.0, details={'well': i}),
        MW_rep.inequality_record(
            'modica_mortola', max(prop_error, 0.0), 0.0, scale=c.mu0, tolerance=1e-12,
            details={'well': i, 'kind': 'plateau properties'},
        ),
    ]

    return ModicaMortolaMap(i, w, grad_w2, bound, fraction, records)

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

def gradient_bound_profile(f, delta=None):
    """sup eps |grad u| over nodes at distance >= delta from the boundary"""

    if delta is None:
        delta = 4.0 * f.epsilon

    X, Y = f.grid.XY
    dist = MW_gf.distance_to_boundary(f.grid, np.column_stack([X.ravel(), Y.ravel()])).reshape(f.grid.shape)
    keep = f.grid.active & (dist >= delta)
    grad_norm = np.sqrt(np.sum(MW_gf.gradient(f)**2, axis=(-2, -1)))

    return float(f.epsilon * np.max(grad_norm[keep], initial=0.0))

# -------------------------------------------------------------------------- #

def potential_domination_check(f, p, c, rho=0.75):
    """Smallest C_T with e <= C_T V/eps on nodes of D(rho) whose value avoids all B(s_i, mu0/4)

    The field is expected on the unit disk (see MW_grid_field.rescale_to_unit).

    Returns
    -------
    c_t : ratio max e / (V/eps) over the far set (0 if empty)
    n_nodes : number of nodes in the far set
    """

    X, Y = f.grid.XY
    in_disk = f.grid.active & (np.hypot(X, Y) <= rho)
    dist = np.min(np.linalg.norm(f.values[..., None, :] - p.sigma, axis=-1), axis=-1)
    theta = in_disk & (dist >= 0.25 * c.mu0)

    if not np.any(theta):
        return 0.0, 0

    density = energy_density(f, p)
    c_t = float(np.max(density.e[theta] / np.maximum(density.v[theta], 1e-300)))
    return c_t, int(np.sum(theta))

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

# ---- End of <MW_functionals.py> ----
