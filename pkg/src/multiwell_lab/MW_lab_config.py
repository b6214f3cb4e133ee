# ---- This is <MW_lab_config.py> ----

"""
Configuration and numerical defaults for the multiwell_lab library
"""

from dotenv import load_dotenv
from os.path import join, dirname
from os import environ

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

# load local .env file
dotenv_path = join(dirname(__file__), '.env')
load_dotenv(dotenv_path)

# default output directory for runs
MW_LAB_OUT = environ.get('MW_LAB_OUT', 'mw_lab_runs')

# default number of worker threads for batch checks
MW_LAB_THREADS = int(environ.get('MW_LAB_THREADS', '1'))

# default file name of the constants manifest inside a run directory
MW_LAB_MANIFEST = environ.get('MW_LAB_MANIFEST', 'constants_manifest.json')

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

# GRID

# grid rule of thumb h = eps/m
CELLS_PER_EPS     = 8
MIN_CELLS_PER_EPS = 4
MIN_CELLS         = 8

# relax refuses h > eps/4 and warns above eps/8
RELAX_MAX_H_RATIO  = 0.25
RELAX_WARN_H_RATIO = 0.125

# sub-samples per axis for partial cell coverage
COVERAGE_SUBSAMPLES      = 2
COVERAGE_SUBSAMPLES_FINE = 8

# circle sampling: n_theta = max(CIRCLE_MIN_SAMPLES, ceil(2 pi r / h))
CIRCLE_MIN_SAMPLES = 256

# --------- #

# POTENTIAL

POTENTIAL_MIN_SAMPLE_BUDGET = 1000
POTENTIAL_SAMPLE_BUDGET     = 4096
SANDWICH_SAMPLES_PER_WELL   = 2048
SHRINK_FACTOR               = 0.5
SHRINK_UNDERFLOW            = 1e-8
WELL_CRITICAL_TOL           = 1e-8
FD_STEP                     = 1e-5

# --------- #

# SOLVER

SOLVER_MAX_FLOW_STEPS   = 4000
SOLVER_FLOW_DT_SAFETY   = 0.2
SOLVER_NEWTON_MAX_ITERS = 30
SOLVER_RESIDUAL_TOL     = 1e-8
SOLVER_SEED_STRATEGY    = 'from-boundary'
SOLVER_SEED_STRATEGIES  = ['from-boundary', 'from-wells-voronoi', 'supplied']
SOLVER_CG_MAXITER       = 2000
SOLVER_CG_RTOL          = 1e-10
SOLVER_ENERGY_TOL       = 1e-10
SOLVER_BLOWUP_FACTOR    = 10.0
SOLVER_BRANCH_JUMP      = 0.25
SOLVER_LINE_SEARCH      = [1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625]

# --------- #

# CHECKS

# default tolerance (slack) per check name
CHECK_TOLERANCES = {
    'hypothesis': 0.0,
    'pointwise_j': 1e-12,
    'trace_free': 1e-12,
    'weak_form': 1e-4,
    'max_principle': 0.0,
    'quadratic_envelope': 1e-10,
    'pohozaev_identity': 0.05,
    'pohozaev_inequality': 0.05,
    'stress_weak_identity': 0.05,
    'complex_stress_agreement': 0.01,
    'monotonicity': 0.05,
    'modica_mortola': 0.01,
    'discrepancy_positivity': 1e-2,
    'good_radius': 1e-9,
    'circle_uniform': 0.0,
    'coarea': 0.05,
    'select_level': 0.0,
    'radius_set': 1e-9,
    'good_circle': 0.05,
    'level_gradient': 0.10,
    'level_flux': 0.10,
    'decay': 0.0,
    'clearing_out': 0.0,
    'turnlog': 0.10,
    'kappacity': 0.0,
    'borneo': 0.0,
    'exterior': 0.0,
    'covering': 0.0,
    'hopf_total_variation': 0.02,
    'shear_constancy': 0.10,
    'dilation_constancy': 0.10,
    'tangent_cone': 0.10,
    'hopf_rotation': 0.02,
    'limit_stress_identity': 0.05,
    'length_bound': 0.0,
    'length_agreement': 0.0,
    'complement_openness': 0.05,
    'clearing_transfer': 0.05,
    'bordurer': 0.0,
    'connectivity': 0.0,
}

# --------- #

# LEVEL SETS

LEVEL_LADDER_SIZE     = 33
COAREA_LADDER_SIZE    = 64

# radius-set and good-circle windows on the unit disk
RADIUS_SET_START      = 0.5
GOOD_CIRCLE_START     = 0.625
GOOD_CIRCLE_MIN_RHO   = 0.75

# --------- #

# CLEARING

DYADIC_LEVELS         = 5
DISK_MIN_EPS_FACTOR   = 4.0
# disk centers for eta0 scans sit on a lattice of spacing DISK_LATTICE_FACTOR * r
DISK_LATTICE_FACTOR   = 0.25
# radii per octave between consecutive dyadic radii
DISK_RADII_PER_OCTAVE = 2
# an eta0 scan on fewer premise disks is degenerate; below the target it is only logged
ETA0_MIN_DISKS        = 20
ETA0_TARGET_DISKS     = 200
ETA0_SCAN_UPPER       = 2.0
K_POT_DEFAULT         = 0.1
K_EXT_DEFAULT         = 0.1

# --------- #

# CONCENTRATION

DENSITY_FLOOR_FACTOR  = 4.0
DENSITY_WINDOW_TOP    = 0.25
PCA_RADIUS_CELLS      = 8
PCA_ANISOTROPY        = 4.0
HOPF_LATTICE_CELLS    = 32
FRAME_MASS_TOL        = 0.02
CONE_TOLERANCE_CELLS  = 1.0
CONE_FINAL_FRACTION   = 0.1
CONE_RADII_CELLS      = [16, 8, 4]
CONE_SLOPE            = 0.25
# regular skeleton cells sampled for the tangent-cone suite
CONE_SAMPLE_POINTS    = 10
CIRCLE_RASTER_WIDTH   = 0.75

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

# ---- End of <MW_lab_config.py> ----
