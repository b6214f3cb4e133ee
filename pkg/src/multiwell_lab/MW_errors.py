# ---- This is <MW_errors.py> ----

"""
Exceptions raised by the multiwell_lab library
"""

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

class MultiwellLabError(Exception):
    """Marker base for all library errors"""

# -------------------------------------------------------------------------- #

# potential

class NonFiniteEvaluation(MultiwellLabError, ValueError):
    pass

class WellNotCritical(MultiwellLabError, ValueError):
    pass

class ShrinkExhausted(MultiwellLabError, RuntimeError):
    pass

# -------------------------------------------------------------------------- #

# geometry

class DiskOutsideDomain(MultiwellLabError, ValueError):
    pass

class CircleOutsideDomain(MultiwellLabError, ValueError):
    pass

class AnnulusOutsideDomain(MultiwellLabError, ValueError):
    pass

class RegionOutsideDomain(MultiwellLabError, ValueError):
    pass

class MaskGeometryError(MultiwellLabError, ValueError):
    pass

class GridMismatch(MultiwellLabError, ValueError):
    pass

class FieldFormatError(MultiwellLabError, ValueError):
    pass

# -------------------------------------------------------------------------- #

# solver

class BlowUp(MultiwellLabError, RuntimeError):
    pass

class StagnationError(MultiwellLabError, RuntimeError):
    pass

# -------------------------------------------------------------------------- #

# checks

class NoRegularLevel(MultiwellLabError, RuntimeError):
    pass

class BoundaryConditionViolated(MultiwellLabError, ValueError):
    pass

class EmptyRadiusSet(MultiwellLabError, ValueError):
    pass

class DegenerateFamily(MultiwellLabError, ValueError):
    pass

class NotRegularPoint(MultiwellLabError, ValueError):
    pass

class HypothesisNotMet(MultiwellLabError, ValueError):
    pass

# -------------------------------------------------------------------------- #

# command line

class ConfigError(MultiwellLabError, ValueError):
    pass

class MissingArtifacts(MultiwellLabError, FileNotFoundError):
    pass

class InsufficientFamily(MultiwellLabError, ValueError):
    pass

# -------------------------------------------------------------------------- #
# -------------------------------------------------------------------------- #

# ---- End of <MW_errors.py> ----
