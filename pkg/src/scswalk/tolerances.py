"""Numerical tolerances shared across the package.

Functions look these up at call time, so assigning a new value to a module
attribute (e.g. ``tolerances.HERMITIAN_TOL = 1e-11``) changes the behaviour
everywhere.
"""

UNITARY_TOL = 1e-10
HERMITIAN_TOL = 1e-12
BLOCH_NORM_TOL = 1e-10
STATE_NORM_TOL = 1e-10
DENSITY_HERMITIAN_TOL = 1e-10
DENSITY_TRACE_TOL = 1e-10
DENSITY_MIN_EIG = -1e-8
DISTRIBUTION_SUM_TOL = 1e-10
# probabilities above -CLIP_TOL are rounded to zero; below it they are an error
CLIP_TOL = 1e-14
SINGULAR_SIN_EPS = 1e-9
# largest planar step allowed between neighbouring Bloch vectors
WINDING_MAX_STEP = 3.141592653589793 - 0.1
