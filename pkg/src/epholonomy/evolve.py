"""Direct Schroedinger evolution along driven parameter curves.

Integrates d/dt Psi = -i H(R(t/T)) Psi with an adaptive embedded
Runge-Kutta scheme and no normalization (the families are generally
non-Hermitian, so the norm is free to change). The module's purpose is
validation: in the slow-driving limit the final state factors into the
tracked eigenvector times dynamical and geometric phase factors, so the
geometric phase extracted from the integrated state must converge to the
discrete loop holonomy as T grows; and over a single traversal of a loop
that permutes labels, the state arrives on the *other* branch, which is
directly measurable as fidelity.

For long T the optional ``shift`` moves the integration into the frame
co-rotating with a reference eigenvalue (an integrating factor): the
equation becomes d/dt Psi~ = -i (H - E_ref I) Psi~. This leaves the
tracked component nearly stationary, so the step controller is not
forced to resolve one dynamical oscillation per period. The subtracted
factor exp(-i int E_ref dt) routinely overflows floating point for
non-Hermitian drives (its exponent grows linearly in T), so it is never
multiplied back into the state: the result reports the co-rotating-frame
state together with ``log_scale``, the exact complex exponent such that
the physical state is exp(log_scale) times the reported one. All derived
quantities (fidelity, extracted phases) are computed in log space and
remain finite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .curves import CurveSpec
from .errors import (HolonomyError, InvalidParams, LowFidelity, NearEP,
                     NonCyclicBranch, OpenCurve, StepUnderflow)
from .families import MatrixFamily
from .phase import _guarded_frame, dynamical_phase, geometric_phase
from .tracking import SpectralPath, track

__all__ = [
    "EvolutionResult",
    "SweepRow",
    "integrate",
    "adiabatic_extract",
    "sweep",
]


@dataclass(frozen=True)
class EvolutionResult:
    """Final state of one driven evolution, projected on one branch.

    Attributes
    ----------
    final_state : complex ndarray
        The evolved state, unnormalized. Without a shift this is Psi(T)
        itself; with a shift it is the co-rotating-frame state, and the
        physical Psi(T) equals exp(log_scale) * final_state (which may
        overflow floats if materialized — that is why it is not).
    overlap : complex
        <phi_label(end)|final_state>, the biorthogonal component on the
        designated branch of the end-point eigensystem, in the same
        frame as final_state.
    fidelity : float
        Norm of the biorthogonal projection psi_label <phi_label|Psi>
        relative to ||Psi||; frame- and scale-invariant; can slightly
        exceed 1 for strongly non-orthogonal eigenbases.
    extracted_total_phase : complex
        -i log of the *physical* branch overlap, i.e. -i (log(overlap)
        + log_scale): dynamical plus geometric phase accumulated on the
        branch, real part modulo 2 pi (resolve windings against a
        discrete reference, as adiabatic_extract does).
    T : float
        Physical duration of the traversal.
    label : int
        Designated spectral label (sorted position at the end point).
    log_scale : complex
        Exponent of the frame factor: physical state = exp(log_scale) *
        final_state. Zero when no shift was used.
    """

    final_state: np.ndarray
    overlap: complex
    fidelity: float
    extracted_total_phase: complex
    T: float
    label: int
    log_scale: complex = 0.0j


@dataclass(frozen=True)
class SweepRow:
    """One adiabatic-convergence measurement."""

    T: float
    error: float
    fidelity: float
    status: str


def _safe_norm(v) -> float:
    """2-norm that survives components near the floating-point ceiling."""
    peak = float(np.max(np.abs(v))) if len(v) else 0.0
    if peak == 0.0 or not np.isfinite(peak):
        return peak
    return peak * float(np.linalg.norm(np.asarray(v) / peak))


def _branch_projection(frame, label, state):
    """(overlap, fidelity) of a state against one frame column."""
    overlap = complex(np.vdot(frame.left[:, label], state))
    norm = _safe_norm(state)
    if norm == 0.0:
        return overlap, 0.0
    fidelity = abs(overlap) * float(np.linalg.norm(frame.right[:, label])) / norm
    return overlap, fidelity


def integrate(family: MatrixFamily, curve: CurveSpec, T: float, psi0,
              rel_tol: float = 1e-10, *, label: int | None = None,
              shift=None) -> EvolutionResult:
    """Evolve psi0 along the driven curve for physical duration T.

    The curve parameter is s = t/T, one full traversal. ``label``
    designates the branch the result is projected on (sorted position in
    the end-point eigensystem); by default the branch with the largest
    initial biorthogonal weight of psi0. ``shift``, optionally
    ``(ts, values)`` from a tracked reference branch, activates the
    co-rotating integrating factor described in the module docstring;
    values are interpolated linearly in s and the exact interpolant
    integral is restored as a phase factor afterwards.

    Raises StepUnderflow when the step controller collapses (the drive is
    effectively singular), InvalidParams on domain errors.
    """
    if not (T > 0.0 and np.isfinite(T)):
        raise InvalidParams(f"duration must be positive and finite, got {T}")
    if not 1e-14 < rel_tol < 1e-2:
        raise InvalidParams(
            f"rel_tol must lie in (1e-14, 1e-2), got {rel_tol}")
    psi0 = np.asarray(psi0, dtype=complex).reshape(-1)
    if psi0.shape[0] != family.dim:
        raise InvalidParams(
            f"psi0 has dimension {psi0.shape[0]}, family expects {family.dim}")
    if not np.all(np.isfinite(psi0.view(float))) or not np.any(psi0):
        raise InvalidParams("psi0 must be finite and nonzero")

    start = _guarded_frame(family, curve.point(0.0))
    if label is None:
        weights = [abs(np.vdot(start.left[:, j], psi0))
                   for j in range(family.dim)]
        label = int(np.argmax(weights))
    elif not 0 <= label < family.dim:
        raise InvalidParams(f"label {label} out of range for dim {family.dim}")

    if shift is None:
        def reference(s):
            return 0.0j
    else:
        ref_ts = np.asarray(shift[0], dtype=float)
        ref_vals = np.asarray(shift[1], dtype=complex)
        if ref_ts.shape != ref_vals.shape or ref_ts.ndim != 1:
            raise InvalidParams("shift must be matching (ts, values) arrays")

        def reference(s):
            return complex(np.interp(s, ref_ts, ref_vals))

    def rhs(tau, y):
        s = tau / T
        H = family(curve.point(s))
        return -1j * (H @ y - reference(s) * y)

    solution = solve_ivp(rhs, (0.0, T), psi0, method="RK45",
                         rtol=rel_tol, atol=rel_tol * 1e-3)
    if not solution.success:
        raise StepUnderflow(
            f"integration stalled before t = {T}: {solution.message}")
    state = solution.y[:, -1].copy()
    log_scale = 0.0j
    if shift is not None:
        # physical Psi = exp(-i * integral of E_ref dt) * Psi~, the
        # integral exact for the piecewise-linear interpolant; kept as a
        # log-space exponent because the factor itself overflows for
        # long non-Hermitian drives
        trapezoid = getattr(np, "trapezoid", None) or np.trapz
        log_scale = -1j * T * complex(trapezoid(ref_vals, ref_ts))

    end = start if curve.closed else _guarded_frame(family, curve.point(1.0))
    overlap, fidelity = _branch_projection(end, label, state)
    total = (-1j * (np.log(overlap) + log_scale) if overlap != 0
             else complex("nan"))
    return EvolutionResult(final_state=state, overlap=overlap,
                           fidelity=float(fidelity),
                           extracted_total_phase=complex(total),
                           T=float(T), label=label, log_scale=log_scale)


def adiabatic_extract(result: EvolutionResult, path: SpectralPath,
                      label: int, k: complex = 1.0) -> complex:
    """Geometric phase recovered from an integrated final state.

    Assumes the evolution started from k * psi_label(0) and ran over the
    path's (closed, label-cyclic) curve in duration result.T. The total
    phase of the branch component is read off with a principal log, the
    dynamical part -int E dt is subtracted using the tracked eigenvalues,
    and the leftover 2 pi winding is resolved by snapping to the discrete
    geometric phase's raw value — the principal log alone cannot tell
    gamma from gamma + 2 pi m.

    Raises LowFidelity when the branch component is too weak for the
    adiabatic decomposition to mean anything (fidelity < 0.9).
    """
    if not path.closed:
        raise OpenCurve("adiabatic extraction needs a closed loop")
    if path.sigma[label] != label:
        raise NonCyclicBranch(
            f"monodromy sends label {label} to {path.sigma[label]}; evolve "
            "over the lifted covering loop instead")
    k = complex(k)
    if k == 0:
        raise InvalidParams("the initial amplitude k must be nonzero")

    end_frame = path.frames[-1]
    end_label = int(path.branch_labels(label)[-1])
    overlap, fidelity = _branch_projection(end_frame, end_label,
                                           result.final_state)
    if fidelity < 0.9:
        raise LowFidelity(
            f"branch fidelity {fidelity:.3f} < 0.9: evolution was not "
            "adiabatic on this branch (increase T)")

    scale = result.T / path.curve.base_period
    delta = scale * dynamical_phase(path, label)
    candidate = -1j * (np.log(overlap / k) + result.log_scale) - delta
    reference = geometric_phase(path, label).geometric
    winding = np.round((reference.real - candidate.real) / (2.0 * np.pi))
    return complex(candidate + 2.0 * np.pi * winding)


def sweep(family: MatrixFamily, curve: CurveSpec, label: int, T_list,
          rel_tol: float = 1e-10, *, n_samples: int = 2048) -> list:
    """Adiabatic-convergence table: one row per duration.

    Tracks the curve once, computes the discrete geometric phase as the
    reference, then for each T integrates from psi_label(0) (with the
    tracked branch as co-rotating shift) and reports |gamma_extracted -
    gamma_discrete| and the branch fidelity. Failures of individual rows
    are recorded in the row status rather than raised, so a partially
    adiabatic sweep still reports its usable decades.
    """
    path = track(family, curve, n_samples)
    discrete = geometric_phase(path, label)
    psi0 = path.frames[0].right[:, label]
    ref = (path.ts, path.eigenvalues(label))
    rows = []
    for T in T_list:
        try:
            result = integrate(family, curve, float(T), psi0, rel_tol,
                               label=label, shift=ref)
            gamma = adiabatic_extract(result, path, label)
            rows.append(SweepRow(T=float(T),
                                 error=float(abs(gamma - discrete.geometric)),
                                 fidelity=result.fidelity, status="ok"))
        except LowFidelity:
            rows.append(SweepRow(T=float(T), error=float("nan"),
                                 fidelity=result.fidelity,
                                 status="non-adiabatic"))
        except HolonomyError as exc:
            rows.append(SweepRow(T=float(T), error=float("nan"),
                                 fidelity=float("nan"),
                                 status=type(exc).__name__))
    return rows
