"""Closed-form machinery for two-level (2 x 2) families.

Any 2 x 2 matrix splits as H = (tr H / 2) I + H0 with traceless
H0 = [[a, b], [c, -a]]; the eigenvalues of H0 are ±f with f a chosen
square root of a^2 + b c. Everything here is built from exact formulas in
(a, b, c, f): eigenvector frames on the two standard coordinate patches,
the connection one-forms of both spectral branches, the scalar transition
functions between the patches, continuation of the root f along a curve
(the two-sheeted structure around an exceptional point made concrete), and
loop holonomies assembled purely from these closed forms. The module is
deliberately independent of the generic eigensolver so the two can audit
each other.

Patch conventions. Patch "M1" uses the frame

    psi_+ = (f + a, c),    psi_- = (-b, f + a),
    phi_+ = (f* + a*, b*) / (2 f* (f* + a*)),
    phi_- = (-c*, f* + a*) / (2 f* (f* + a*)),

valid while f + a != 0; patch "M2" is the same frame with f -> -f and the
branch labels swapped (valid while f - a != 0). On the overlap the frames
differ branchwise by the scalar transition

    psi^M2_± = G_± psi^M1_±  with  G_+ = -b / (f + a),  G_- = c / (f + a).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import CurveSpec, discretize
from .errors import (
    BranchAmbiguity,
    InvalidParams,
    NearEP,
    NonCyclicBranch,
    PatchSingular,
)
from .families import MatrixFamily
from .linalg import EP_GUARD_RTOL

__all__ = [
    "TwoLevelPoint",
    "PatchFrame2x2",
    "split_traceless",
    "point_from_matrix",
    "best_patch",
    "frame_closed_form",
    "connection_closed_form",
    "transition_closed_form",
    "continue_f",
    "connection_quadrature",
    "closed_form_holonomy",
    "closed_form_phase",
    "PATCH_TOL",
]

PATCH_TOL = 1e-9         # relative floor for the patch denominators |f ± a|
F_CONSISTENCY_TOL = 1e-9   # |f^2 - (a^2 + bc)| allowed, relative
DF_CONSISTENCY_TOL = 1e-3  # differential constraint check (catches branch bugs)
CYCLIC_F_TOL = 1e-8        # |f(1) - f(0)| for a branch to count as closed


def split_traceless(H) -> tuple[complex, complex, complex, complex]:
    """Split H into trace part and traceless entries: (shift, a, b, c).

    H = shift * I + [[a, b], [c, -a]].
    """
    H = np.asarray(H, dtype=complex)
    if H.shape != (2, 2):
        raise InvalidParams(f"expected a 2x2 matrix, got shape {H.shape}")
    shift = 0.5 * (H[0, 0] + H[1, 1])
    return complex(shift), complex(0.5 * (H[0, 0] - H[1, 1])), \
        complex(H[0, 1]), complex(H[1, 0])


@dataclass(frozen=True)
class TwoLevelPoint:
    """Traceless 2 x 2 data (a, b, c) with a chosen root f of a^2 + bc.

    The root choice selects the sheet of the two-sheeted eigenvalue
    structure; ``patch`` names the coordinate patch whose frame formulas
    are intended at this point ("M1" or "M2").
    """

    a: complex
    b: complex
    c: complex
    f: complex
    patch: str = "M1"

    def __post_init__(self):
        if self.patch not in ("M1", "M2"):
            raise InvalidParams(f"patch must be M1 or M2, got {self.patch!r}")
        target = self.a * self.a + self.b * self.c
        scale = max(abs(self.f) ** 2, abs(target), 1e-300)
        if abs(self.f * self.f - target) > F_CONSISTENCY_TOL * scale:
            raise InvalidParams(
                f"f^2 = {self.f * self.f:.6g} is not a root of a^2 + bc = {target:.6g}")
        if self.f == 0:
            raise InvalidParams("f = 0 is an exceptional point; no frame exists")

    @property
    def scale(self) -> float:
        return max(abs(self.a), abs(self.b), abs(self.c), abs(self.f))

    @property
    def m1_valid(self) -> bool:
        return abs(self.f + self.a) > PATCH_TOL * self.scale

    @property
    def m2_valid(self) -> bool:
        return abs(self.f - self.a) > PATCH_TOL * self.scale


@dataclass(frozen=True)
class PatchFrame2x2:
    """Closed-form eigenvector frame of a traceless 2 x 2 matrix.

    psi_plus/psi_minus are right eigenvectors for eigenvalues +f/-f;
    phi_plus/phi_minus the biorthonormal left partners
    (<phi_i|psi_j> = delta_ij holds exactly by construction).
    """

    psi_plus: np.ndarray
    psi_minus: np.ndarray
    phi_plus: np.ndarray
    phi_minus: np.ndarray
    patch: str
    f: complex

    def psi(self, branch: str) -> np.ndarray:
        return self.psi_plus if branch == "+" else self.psi_minus

    def phi(self, branch: str) -> np.ndarray:
        return self.phi_plus if branch == "+" else self.phi_minus


def best_patch(a: complex, f: complex) -> str:
    """The better-conditioned patch at this point: larger |f ± a| wins."""
    return "M1" if abs(f + a) >= abs(f - a) else "M2"


def point_from_matrix(H, *, near_f: complex | None = None,
                      patch: str | None = None) -> tuple[complex, TwoLevelPoint]:
    """Split H and choose a root of a^2 + bc; returns (shift, point).

    The principal root is taken unless ``near_f`` is given, in which case
    the root closer to it wins (used when continuing a branch). The patch
    defaults to the better-conditioned one.
    """
    shift, a, b, c = split_traceless(H)
    f = complex(np.sqrt(complex(a * a + b * c)))
    if near_f is not None and abs(-f - near_f) < abs(f - near_f):
        f = -f
    if patch is None:
        patch = best_patch(a, f)
    return shift, TwoLevelPoint(a=a, b=b, c=c, f=f, patch=patch)


def _check_patch(p: TwoLevelPoint) -> complex:
    """Return the patch denominator f + a (M1) or f - a (M2), or raise."""
    if p.patch == "M1":
        den = p.f + p.a
        if abs(den) <= PATCH_TOL * p.scale:
            raise PatchSingular(
                f"frame denominator |f + a| = {abs(den):.3e} vanishes; switch to M2")
    else:
        den = p.f - p.a
        if abs(den) <= PATCH_TOL * p.scale:
            raise PatchSingular(
                f"frame denominator |f - a| = {abs(den):.3e} vanishes; switch to M1")
    return den


def frame_closed_form(p: TwoLevelPoint) -> PatchFrame2x2:
    """Exact eigenvector frame of [[a, b], [c, -a]] on the point's patch.

    Raises PatchSingular when the patch denominator vanishes (the point
    lies outside the patch); the caller should rebuild the point on the
    other patch.
    """
    _check_patch(p)
    a, b, c, f = p.a, p.b, p.c, p.f
    if p.patch == "M1":
        g = f + a
        psi_p = np.array([g, c], dtype=complex)
        psi_m = np.array([-b, g], dtype=complex)
        den = 2.0 * np.conj(f) * np.conj(g)
        phi_p = np.array([np.conj(g), np.conj(b)], dtype=complex) / den
        phi_m = np.array([-np.conj(c), np.conj(g)], dtype=complex) / den
    else:
        # M1 frame with f -> -f, branch labels swapped back to eigenvalue order
        g = a - f
        psi_p = np.array([-b, g], dtype=complex)
        psi_m = np.array([g, c], dtype=complex)
        den = -2.0 * np.conj(f) * np.conj(g)
        phi_p = np.array([-np.conj(c), np.conj(g)], dtype=complex) / den
        phi_m = np.array([np.conj(g), np.conj(b)], dtype=complex) / den
    return PatchFrame2x2(psi_plus=psi_p, psi_minus=psi_m,
                         phi_plus=phi_p, phi_minus=phi_m,
                         patch=p.patch, f=f)


def connection_closed_form(p: TwoLevelPoint, da: complex, db: complex,
                           dc: complex, df: complex, branch: str = "+") -> complex:
    """Connection one-form i<phi|d psi> of the given branch on p's patch.

    Evaluated on the tangent increment (da, db, dc, df); the increments
    must satisfy the differentiated root constraint
    2 f df = 2 a da + b dc + c db (checked loosely; catches wrong-branch
    df). Closed forms:

        M1:  A_+ = (i/2f) (b dc / (f+a) + df + da)
             A_- = (i/2f) (c db / (f+a) + df + da)
        M2:  A_± = A_∓ of M1 with f -> -f.
    """
    if branch not in ("+", "-"):
        raise InvalidParams(f"branch must be '+' or '-', got {branch!r}")
    lhs = 2.0 * p.f * df
    rhs = 2.0 * p.a * da + p.b * dc + p.c * db
    m = max(abs(lhs), abs(rhs), abs(p.f * da), abs(p.f * db), abs(p.f * dc))
    if m > 0 and abs(lhs - rhs) > DF_CONSISTENCY_TOL * m:
        raise InvalidParams(
            f"df violates 2 f df = 2 a da + b dc + c db "
            f"(residual {abs(lhs - rhs):.3e} vs scale {m:.3e})")
    _check_patch(p)
    a, b, c, f = p.a, p.b, p.c, p.f
    if p.patch == "M1":
        if branch == "+":
            return (0.5j / f) * (b * dc / (f + a) + df + da)
        return (0.5j / f) * (c * db / (f + a) + df + da)
    # M2 = M1 with f -> -f and branches swapped
    if branch == "+":
        return (-0.5j / f) * (c * db / (a - f) - df + da)
    return (-0.5j / f) * (b * dc / (a - f) - df + da)


def transition_closed_form(p: TwoLevelPoint, branch: str = "+") -> complex:
    """Scalar G relating the patch frames: psi^M2_branch = G * psi^M1_branch.

    G_+ = -b / (f + a), G_- = c / (f + a). Requires the point to lie in
    the patch overlap (both denominators nonzero), else PatchSingular.
    The inverse scalar relates the frames the other way:
    psi^M1 = (1/G) psi^M2.
    """
    if branch not in ("+", "-"):
        raise InvalidParams(f"branch must be '+' or '-', got {branch!r}")
    s = p.scale
    if abs(p.f + p.a) <= PATCH_TOL * s or abs(p.f - p.a) <= PATCH_TOL * s:
        raise PatchSingular(
            "point lies outside the patch overlap (f + a or f - a vanishes)")
    if branch == "+":
        return -p.b / (p.f + p.a)
    return p.c / (p.f + p.a)


def _abc(family: MatrixFamily, point) -> tuple[complex, complex, complex, float]:
    H = family(point)
    if H.shape != (2, 2):
        raise InvalidParams("closed forms need a 2x2 family")
    _, a, b, c = split_traceless(H)
    return a, b, c, float(np.linalg.norm(H, 2))


def _continue_step(family, curve, t0, f0, t1, depth: int) -> complex:
    """Root of a^2 + bc at t1 continued from (t0, f0); bisects ambiguity."""
    a, b, c, scale = _abc(family, curve.point(t1))
    r = complex(np.sqrt(complex(a * a + b * c)))
    if 2.0 * abs(r) < EP_GUARD_RTOL * max(scale, 1e-300):
        raise NearEP(f"|f| = {abs(r):.3e} at t = {t1:.6g}: too close to a degeneracy")
    d_plus = abs(r - f0)
    d_minus = abs(-r - f0)
    lo, hi = min(d_plus, d_minus), max(d_plus, d_minus)
    if hi < 2.0 * lo:
        # the two sheets are about equally near: halve the step
        if depth <= 0:
            raise BranchAmbiguity(
                f"cannot disambiguate the root between t = {t0:.6g} and {t1:.6g}")
        tm = 0.5 * (t0 + t1)
        fm = _continue_step(family, curve, t0, f0, tm, depth - 1)
        return _continue_step(family, curve, tm, fm, t1, depth - 1)
    return r if d_plus < d_minus else -r


MAX_BISECTION_DEPTH = 20


def continue_f(family: MatrixFamily, curve: CurveSpec, f_start: complex,
               n_samples: int) -> tuple[np.ndarray, np.ndarray]:
    """Continue the root f of a^2 + bc along the curve from f_start.

    Returns (ts, fs) on the uniform sample grid (n_samples + 1 points).
    At each step the root nearer the previous value is chosen; steps where
    the choice is ambiguous are bisected (raising BranchAmbiguity when the
    depth limit is hit, which indicates the curve runs too close to a
    branch point — also guarded directly by NearEP).
    """
    ts, _ = discretize(curve, n_samples)
    a, b, c, scale = _abc(family, curve.point(0.0))
    target = a * a + b * c
    f_start = complex(f_start)
    cmp_scale = max(abs(f_start) ** 2, abs(target), 1e-300)
    if abs(f_start * f_start - target) > F_CONSISTENCY_TOL * cmp_scale:
        raise InvalidParams(
            f"f_start^2 = {f_start * f_start:.6g} does not match "
            f"a^2 + bc = {target:.6g} at the curve start")
    if 2.0 * abs(f_start) < EP_GUARD_RTOL * max(scale, 1e-300):
        raise NearEP("curve starts at a degeneracy")

    fs = np.empty(ts.shape[0], dtype=complex)
    fs[0] = f_start
    for k in range(ts.shape[0] - 1):
        fs[k + 1] = _continue_step(family, curve, float(ts[k]), complex(fs[k]),
                                   float(ts[k + 1]), MAX_BISECTION_DEPTH)
    return ts, fs


def connection_quadrature(family: MatrixFamily, curve: CurveSpec, branch: str,
                          n_samples: int, *, patch: str | None = None,
                          f_start: complex | None = None) -> complex:
    """Loop integral of the closed-form connection on a single fixed patch.

    Uses fourth-order central tangent increments of (a, b, c) and the exact
    differentiated root constraint for df, so the branch structure of f is
    respected by construction. The whole loop must stay inside one patch;
    PatchSingular propagates otherwise (use closed_form_holonomy then).
    """
    if not curve.closed:
        raise InvalidParams("connection_quadrature integrates closed loops")
    ts, pts = discretize(curve, n_samples)
    if f_start is None:
        a0, b0, c0, _ = _abc(family, pts[0])
        f_start = complex(np.sqrt(complex(a0 * a0 + b0 * c0)))
    _, fs = continue_f(family, curve, f_start, n_samples)

    n = n_samples
    abcs = np.empty((n, 3), dtype=complex)
    for k in range(n):
        a, b, c, _ = _abc(family, pts[k])
        abcs[k] = (a, b, c)
    if patch is None:
        patch = best_patch(abcs[0][0], fs[0])

    total = 0.0 + 0.0j
    for k in range(n):
        a, b, c = abcs[k]
        f = fs[k]
        # fourth-order central increments; the closed loop wraps around
        p2 = abcs[(k + 2) % n]
        p1 = abcs[(k + 1) % n]
        m1 = abcs[(k - 1) % n]
        m2 = abcs[(k - 2) % n]
        da, db, dc = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / 12.0
        df = (2.0 * a * da + b * dc + c * db) / (2.0 * f)
        p = TwoLevelPoint(a=a, b=b, c=c, f=f, patch=patch)
        total += connection_closed_form(p, da, db, dc, df, branch)
    return total


def closed_form_holonomy(family: MatrixFamily, curve: CurveSpec, branch: str,
                         n_samples: int, *, f_start: complex | None = None) -> complex:
    """Geometric phase of a closed branch from closed-form frames only.

    Builds the frame at every sample from the patch formulas (choosing the
    better-conditioned patch pointwise; the scalar patch transitions are
    absorbed exactly by the mixed-frame overlaps) and returns the
    symmetrized overlap sum

        gamma = (i/2) * sum_k [ log <phi(t_k) | psi(t_{k+1})>
                              - log <phi(t_{k+1}) | psi(t_k)> ]

    with principal logarithms and the final sample identified with the
    first.  The one-sided product carries a first-order error whose
    coefficient is gauge invariant (so no normalization removes it); the
    backward factors cancel it, leaving second-order convergence.  Raises
    NonCyclicBranch when the continued root does not return to its start
    (lift the curve first).
    """
    if not curve.closed:
        raise InvalidParams("closed_form_holonomy needs a closed loop")
    if branch not in ("+", "-"):
        raise InvalidParams(f"branch must be '+' or '-', got {branch!r}")
    ts, pts = discretize(curve, n_samples)
    if f_start is None:
        a0, b0, c0, _ = _abc(family, pts[0])
        f_start = complex(np.sqrt(complex(a0 * a0 + b0 * c0)))
    _, fs = continue_f(family, curve, f_start, n_samples)
    if abs(fs[-1] - fs[0]) > CYCLIC_F_TOL * max(abs(fs[0]), 1e-300):
        raise NonCyclicBranch(
            f"branch does not close: f(1) - f(0) = {fs[-1] - fs[0]:.3e}; "
            "lift the loop to the branch's period first")

    frames = []
    for k in range(n_samples):
        a, b, c, _ = _abc(family, pts[k])
        p = TwoLevelPoint(a=a, b=b, c=c, f=complex(fs[k]),
                          patch=best_patch(a, fs[k]))
        frames.append(frame_closed_form(p))
    frames.append(frames[0])  # exact closure

    total = 0.0 + 0.0j
    for k in range(n_samples):
        fwd = np.vdot(frames[k].phi(branch), frames[k + 1].psi(branch))
        bwd = np.vdot(frames[k + 1].phi(branch), frames[k].psi(branch))
        total += np.log(fwd) - np.log(bwd)
    return 0.5j * total


def closed_form_phase(name: str, branch: str = "+", *, alpha=1.0,
                      beta=2.0) -> complex | None:
    """Known closed-form geometric phase for a built-in family's unit loop.

    For the family with eigenvalues ±beta z ("nonsym_b") the positively
    oriented unit-circle loop gives gamma_± = -pi (1 ∓ alpha/beta); for the
    upper-triangular family ("nonsym_a") both phases vanish mod 2 pi.
    Returns None when no closed form is on record. Values are mod 2 pi.
    """
    if branch not in ("+", "-"):
        raise InvalidParams(f"branch must be '+' or '-', got {branch!r}")
    if name == "nonsym_b":
        alpha = complex(alpha)
        beta = complex(beta)
        if beta == 0:
            raise InvalidParams("beta must be nonzero")
        sign = 1.0 if branch == "+" else -1.0
        return -np.pi * (1.0 - sign * alpha / beta)
    if name == "nonsym_a":
        return 0.0 + 0.0j
    return None
