"""Exception types raised across the package.

Every error condition that callers are expected to handle gets its own
class so they can be caught individually; all inherit from HolonomyError.
"""


class HolonomyError(Exception):
    """Base class for all package-specific errors."""


class InvalidParams(HolonomyError):
    """Malformed input: bad shapes, non-finite entries, unknown names."""


class DegenerateInput(HolonomyError):
    """Eigenvalues collide beyond tolerance: an exceptional or near-degenerate matrix."""


class NoConvergence(HolonomyError):
    """Eigensolve or pairing failed to reach the required residual."""


class SelfOrthogonal(HolonomyError):
    """A left/right eigenvector pair has (numerically) zero inner product."""


class InvalidSampling(HolonomyError):
    """Curve discretization request too coarse or otherwise unusable."""


class NearEP(HolonomyError):
    """A sample point is too close to an eigenvalue coalescence to trust."""


class AmbiguousMatching(HolonomyError):
    """Eigenvalue step matching stayed ambiguous at maximum refinement depth."""


class OpenCurve(HolonomyError):
    """Operation requires a closed curve."""


class NonCyclicBranch(HolonomyError):
    """The requested label is permuted by the loop's monodromy; lift first."""


class PrecisionLoss(HolonomyError):
    """A single-step frame overlap strayed too far from 1: sampling too coarse."""


class MismatchedJunction(HolonomyError):
    """Adjacent patch segments disagree at their junction point."""


class ZeroGauge(HolonomyError):
    """A gauge rescaling factor is zero within tolerance."""


class PatchSingular(HolonomyError):
    """Closed-form patch frame requested at a point where that patch degenerates."""


class BranchAmbiguity(HolonomyError):
    """Square-root branch continuation stayed ambiguous at maximum refinement depth."""


class StepUnderflow(HolonomyError):
    """The adaptive integrator's step size collapsed below machine resolution."""


class LowFidelity(HolonomyError):
    """The evolved state has drifted off the tracked eigenbranch."""


class ConfigError(HolonomyError):
    """Job configuration file is missing, malformed, or inconsistent."""
