"""Numerical tolerance knobs shared across the package.

All rank/feasibility decisions reduce to a handful of thresholds.  They are
module-level constants so tests can reference the exact values; the general
feasibility tolerance can be overridden per call, via the ``HERGLOTZ_TOL``
environment variable, or by the CLI ``--tol`` flag.
"""

import os

# Singular values below RANK_RTOL * sigma_max count as zero in every
# numerical rank / null-space computation.
RANK_RTOL = 1e-10

# Eigenvalues of a weight matrix above -PSD_RTOL * ||W|| are accepted as
# nonnegative (serialization round-trips introduce noise at this scale).
PSD_RTOL = 1e-10

# Atoms whose weight norm falls below this are dropped before extremality
# analysis.
ZERO_WEIGHT_NORM = 1e-12

# Default residual tolerance for membership checks and linear-constraint
# verification.
DEFAULT_TOL = 1e-8


def tolerance(override: float | None = None) -> float:
    """Resolve the feasibility tolerance: explicit > environment > default."""
    if override is not None:
        return float(override)
    env = os.environ.get("HERGLOTZ_TOL")
    if env:
        return float(env)
    return DEFAULT_TOL
