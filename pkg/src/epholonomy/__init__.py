"""Adiabatic geometric phases for non-Hermitian matrix Hamiltonians.

The package tracks eigenvalue branches of a matrix family around closed
parameter loops, detects the monodromy permutation induced by encircled
exceptional points, lifts non-cyclic branches to their covering loops, and
computes dynamical phases, geometric phases (holonomies), curvature
two-forms and direct Schroedinger evolution for validation.
"""

from .errors import (
    AmbiguousMatching,
    BranchAmbiguity,
    ConfigError,
    DegenerateInput,
    HolonomyError,
    InvalidParams,
    InvalidSampling,
    LowFidelity,
    MismatchedJunction,
    NearEP,
    NoConvergence,
    NonCyclicBranch,
    OpenCurve,
    PatchSingular,
    PrecisionLoss,
    SelfOrthogonal,
    StepUnderflow,
    ZeroGauge,
)
from .curves import (
    CurveSpec,
    circle,
    concatenate,
    discretize,
    ellipse,
    fourier_loop,
    lift,
    parametric_polynomial,
    polyline,
    reversed_curve,
    subcurve,
)
from .families import (
    MatrixFamily,
    as_complex,
    example_family,
    polynomial_family,
)
from .linalg import (
    DegeneracyClass,
    Eigenframe,
    biorthonormalize,
    classify_degeneracy,
    eig_2x2,
    eig_general,
)
from .tracking import (
    Monodromy,
    SpectralPath,
    lift_closed,
    monodromy_group,
    monodromy_of,
    track,
)
from .phase import (
    CurvatureSample,
    PhaseResult,
    curvature,
    default_curvature_step,
    dynamical_phase,
    gauge_perturb,
    geometric_phase,
    multipatch_phase,
    stokes_check,
)
from .evolve import (
    EvolutionResult,
    SweepRow,
    adiabatic_extract,
    integrate,
    sweep,
)

__version__ = "0.1.0"
