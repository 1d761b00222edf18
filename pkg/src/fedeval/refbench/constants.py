"""Published constants of the reference benchmark.

These are checked into the cube bundle (rendered into the task scripts),
so preparation and the linear model are fixed functions: determinism over
realism. Columns are f1..f4.
"""

FEATURE_COUNT = 4

# Class-1 feature means sit this far from class 0's (which sits at the
# site displacement alone).
CLASS_SEPARATION = (1.0, 0.75, -0.5, 0.25)

# Feature-mean displacement applied per unit of site shift.
SHIFT_DISPLACEMENT = (1.0, 0.5, 0.75, 0.25)

# Fixed published normalization applied by the preparation cube
# (constant across sites; per-site scaling would break determinism).
PREP_CENTER = (0.5, 0.4, -0.25, 0.15)
PREP_SCALE = (1.2, 1.1, 1.15, 1.05)

# Fixed published weights of the linear reference model, applied to the
# prepared (normalized) features.
LINEAR_WEIGHTS = (0.8, 0.7, -0.45, 0.25)
LINEAR_BIAS = 0.02

# CSV formatting: 6 fractional digits, '.' decimal separator.
VALUE_FORMAT = "%.6f"
