"""Extremality analysis for constrained positive matrix measures, with the
concrete function theory of the annulus (Herglotz and Schur classes) on top.

The package splits into four layers:

* :mod:`herglotz.geometry` -- finite-dimensional convexity primitives:
  interior-of-convex-hull tests, weak independence of subspace families,
  and the admissible-perturbation null space.
* :mod:`herglotz.measures` -- the constrained matrix-measure ball:
  membership, extremality certificates, extreme-measure constructors and
  convex decomposition into extreme points.
* :mod:`herglotz.annulus` -- Dirichlet solver, Poisson/harmonic-measure
  quadrature, the conjugate-period constraint functional and extremal
  Herglotz functions on the annulus ``q < |z| < 1``.
* :mod:`herglotz.schur` -- Cayley transforms, matrix Moebius maps,
  defect-kernel identities and the decomposition residual check for
  scalar Schur functions.

``herglotz.cli`` exposes the same operations as a batch command-line tool.
"""

from .config import tolerance
from .errors import (
    DepthExceededError,
    PreconditionError,
    SchemaError,
)
from .geometry import (
    PerturbationTuple,
    Subspace,
    admissible_perturbation_space,
    phi_constrained_weakly_independent,
    solve_convex_weights,
    weakly_independent,
    zero_interior_convex_hull,
)
from .measures import (
    Atom,
    ChoquetDecomposition,
    DiscreteMatrixMeasure,
    ExtremalityReport,
    MembershipReport,
    boundary_component_mass,
    build_special,
    build_spectral,
    choquet_decompose,
    is_extreme,
    split_along,
    validate_membership,
)
from .annulus import (
    Annulus,
    BoundaryPoint,
    INNER,
    LaurentHarmonic,
    OUTER,
)
from .schur import (
    MatrixFunctionSample,
    cayley,
    cayley_inverse,
    matrix_cayley,
    matrix_cayley_inverse,
    mobius_apply,
    mobius_inverse,
    normalize_schur,
)

__all__ = [
    "Annulus",
    "Atom",
    "BoundaryPoint",
    "ChoquetDecomposition",
    "DepthExceededError",
    "DiscreteMatrixMeasure",
    "ExtremalityReport",
    "INNER",
    "LaurentHarmonic",
    "MatrixFunctionSample",
    "MembershipReport",
    "OUTER",
    "PerturbationTuple",
    "PreconditionError",
    "SchemaError",
    "Subspace",
    "admissible_perturbation_space",
    "boundary_component_mass",
    "build_special",
    "build_spectral",
    "cayley",
    "cayley_inverse",
    "choquet_decompose",
    "is_extreme",
    "matrix_cayley",
    "matrix_cayley_inverse",
    "mobius_apply",
    "mobius_inverse",
    "normalize_schur",
    "phi_constrained_weakly_independent",
    "solve_convex_weights",
    "split_along",
    "tolerance",
    "validate_membership",
    "weakly_independent",
    "zero_interior_convex_hull",
]

__version__ = "0.1.0"
