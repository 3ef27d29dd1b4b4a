"""Default numerical tolerances shared across the package."""

#: A criterion reports a detection only when its violation exceeds this.
DETECTION_TOL = 1e-10

#: Slack allowed when testing ``gamma + i*Omega >= 0`` and ``nu >= 1``.
PHYSICALITY_TOL = 1e-9

#: Maximum absolute asymmetry accepted for "symmetric" inputs.
SYMMETRY_TOL = 1e-12

#: Off-diagonal mass (relative) at which the Jacobi SVD stops sweeping.
JACOBI_TOL = 1e-13

#: Hard cap on Jacobi sweeps before giving up.
JACOBI_MAX_SWEEPS = 60

#: Allowed relative mismatch between closed-form and summed normalizations.
NORMALIZATION_RTOL = 1e-10

#: Pattern search stops once the poll step falls below this.
MIN_STEP = 1e-10
