"""Dynamical and geometric phases along tracked spectral paths.

The geometric phase of a closed branch is computed from frame overlaps as
the symmetrized log product

    gamma = (i/2) * sum_k [ log <phi(t_k)|psi(t_{k+1})>
                          - log <phi(t_{k+1})|psi(t_k)> ]

over the sample loop, with principal logarithms and the final frame
identified with the first. Each one-sided product alone carries a
first-order discretization error whose coefficient is gauge invariant, so
no choice of section removes it; forward and backward together cancel it,
and on analytic loops the symmetric sum converges superalgebraically
(uniform sums of smooth periodic data).

The holonomy factor is assembled separately from the plain overlap
products, which are invariant under per-sample gauge rescalings as exact
telescoping products, not merely up to log branches; the reported phase is
then reconciled so that ``exp(i * geometric) == holonomy_factor`` holds to
rounding. Under a smooth section the reconciliation is a no-op; under
violent per-sample rescalings it can shift the raw phase by pi while the
factor stays put, which is the correct gauge behavior (raw values are
meaningful only for a pinned section).

Curvature two-forms come in the same two independent flavors the loop
phases do: a sum-over-states formula using matrix derivatives, and a
gauge-invariant four-corner plaquette (the discrete exterior derivative of
the connection); stokes_check closes the triangle by comparing a small
planar loop's phase against the integrated curvature.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import (DegenerateInput, InvalidParams, MismatchedJunction,
                     NearEP, NonCyclicBranch, OpenCurve, SelfOrthogonal,
                     ZeroGauge)
from .families import MatrixFamily
from .linalg import EP_GUARD_RTOL, eig_2x2, eig_general
from .tracking import SpectralPath, monodromy_of, track

__all__ = [
    "PhaseResult",
    "CurvatureSample",
    "dynamical_phase",
    "geometric_phase",
    "gauge_perturb",
    "multipatch_phase",
    "curvature",
    "stokes_check",
    "default_curvature_step",
    "STEP_PRODUCT_TOL",
    "JUNCTION_TOL",
]

STEP_PRODUCT_TOL = 0.5      # |fwd*bwd - 1| beyond this => PrecisionLoss
JUNCTION_TOL = 1e-6         # transition-consistency tolerance
CURVATURE_STEP_FACTOR = 1e-4
STOKES_GRID = (64, 64)      # radial x angular midpoint cells

_trapezoid = getattr(np, "trapezoid", None) or np.trapz


@dataclass(frozen=True)
class PhaseResult:
    """Phases of one spectral branch around a closed (lifted) loop.

    Attributes
    ----------
    label : int
        Spectral label of the branch at the start sample.
    dynamical : complex
        Minus the time integral of the branch eigenvalue over the physical
        duration (complex for complex spectra).
    geometric : complex
        Raw (unwrapped) geometric phase; real part is the phase angle,
        imaginary part the geometric amplitude change.
    holonomy_factor : complex
        exp(i * geometric), computed gauge-invariantly; not necessarily
        unimodular for non-Hermitian families.
    traversals : int
        Covering multiplicity of the loop that was integrated.
    n_samples_used : int
        Number of steps in the discrete product.
    """

    label: int
    dynamical: complex
    geometric: complex
    holonomy_factor: complex
    traversals: int
    n_samples_used: int

    @property
    def geometric_mod_2pi(self) -> float:
        """Real part of the geometric phase wrapped to (-pi, pi]."""
        return float(-((-self.geometric.real + np.pi) % (2.0 * np.pi) - np.pi))


@dataclass(frozen=True)
class CurvatureSample:
    """Curvature two-form of one branch at one parameter point.

    components[mu, nu] is the (mu, nu) two-form component; the array is
    antisymmetric exactly (the lower triangle is the negated upper one).
    """

    point: np.ndarray
    label: int
    components: np.ndarray
    method: str
    h: float


def dynamical_phase(path: SpectralPath, label: int) -> complex:
    """Minus the trapezoidal time integral of one branch's eigenvalue.

    Physical time runs over the curve's base period (for lifted curves
    that period already covers every traversal). Works for open and
    closed paths alike.
    """
    values = path.eigenvalues(label)
    times = path.ts * path.curve.base_period
    return complex(-_trapezoid(values, times))


def _overlap_fold(psis, phis, ts, samples, guard):
    """Symmetric log-sum and exact overlap products along chosen samples.

    Walks consecutive pairs of ``samples`` (indices into the vector
    sequences) and returns (symmetric log sum, forward product, backward
    product). With ``guard`` on, raises PrecisionLoss when a step's
    gauge-invariant overlap product strays too far from 1, the signature
    of under-sampling (single-sided overlaps are gauge-dependent and
    intentionally not judged).
    """
    from .errors import PrecisionLoss

    log_sym = 0.0j
    prod_fwd = 1.0 + 0.0j
    prod_bwd = 1.0 + 0.0j
    for i, j in zip(samples[:-1], samples[1:]):
        fwd = complex(np.vdot(phis[i], psis[j]))
        bwd = complex(np.vdot(phis[j], psis[i]))
        step = fwd * bwd
        if guard and abs(step - 1.0) > STEP_PRODUCT_TOL:
            raise PrecisionLoss(
                f"step overlap product deviates from 1 by {abs(step - 1.0):.3g} "
                f"on t in [{ts[i]:.9g}, {ts[j]:.9g}]: sampling too coarse "
                "for this loop; increase n_samples")
        log_sym += np.log(fwd) - np.log(bwd)
        prod_fwd *= fwd
        prod_bwd *= bwd
    return 0.5j * log_sym, prod_fwd, prod_bwd


def _signed_root(prod_fwd, prod_bwd):
    """sqrt(B/F) with the sign resolved toward 1/F.

    All three quantities are invariant under per-sample rescalings as
    exact telescoping products (up to the common endpoint ratio on open
    paths); 1/F carries a first-order phase error, far too small to
    confuse a binary sign choice at any usable resolution.
    """
    root = np.sqrt(prod_bwd / prod_fwd)
    reference = 1.0 / prod_fwd
    return root if abs(root - reference) <= abs(root + reference) else -root


def _resolved_phase(psis, phis, ts, richardson=True):
    """Gauge-invariant holonomy factor and reconciled raw phase.

    The stride-1 symmetric log sum carries an O(h^2) error whose
    coefficient is itself gauge invariant, so it is removed by Richardson
    extrapolation against the stride-2 product over the same samples (odd
    tails keep their plain stride-1 step), pushing the error to O(h^4) on
    uniform samples. The extrapolation is applied to the invariant
    factors: r = factor_1 / factor_2 is near 1, its principal cube root
    is unambiguous, and factor_1 * r^(1/3) stays exactly invariant. The
    raw phase is the symmetric sum nudged by a multiple of pi so that
    exp(i * phase) equals the factor to rounding (a no-op for smooth
    sections). If the strides disagree wildly (|r - 1| > 0.1 means the
    asymptotic regime is out of reach) the correction is skipped rather
    than trusted. ``richardson=False`` keeps the plain stride-1 result
    (used where a stride-2 walk would not retrace the same curve, e.g.
    four-corner plaquettes).
    """
    n = len(psis) - 1
    fine = list(range(n + 1))
    log_fine, fwd_fine, bwd_fine = _overlap_fold(psis, phis, ts, fine, True)
    factor = _signed_root(fwd_fine, bwd_fine)
    gamma = log_fine + (-1j * np.log(factor * np.exp(-1j * log_fine)))
    if richardson and n >= 4:
        coarse = list(range(0, n + 1, 2))
        if coarse[-1] != n:
            coarse.append(n)
        _, fwd_c, bwd_c = _overlap_fold(psis, phis, ts, coarse, False)
        ratio = factor / _signed_root(fwd_c, bwd_c)
        if abs(ratio - 1.0) <= 0.1:
            correction = (-1j / 3.0) * np.log(ratio)
            gamma = gamma + correction
            factor = factor * np.exp(1j * correction)
            gamma = gamma + (-1j * np.log(factor * np.exp(-1j * gamma)))
    return complex(gamma), complex(factor)


def geometric_phase(path: SpectralPath, label: int) -> PhaseResult:
    """Geometric phase and holonomy factor of one closed branch.

    The path must come from a closed curve whose monodromy fixes the
    label; a branch that returns to a different sheet has no single-loop
    holonomy and must be lifted to its covering loop first.

    Raises
    ------
    OpenCurve
        If the path's curve is not closed.
    NonCyclicBranch
        If the monodromy moves the label.
    PrecisionLoss
        If any step's overlap product strays from 1 by more than
        STEP_PRODUCT_TOL (the loop is under-sampled).
    """
    if not path.closed:
        raise OpenCurve("geometric_phase needs a closed curve")
    if path.sigma[label] != label:
        raise NonCyclicBranch(
            f"monodromy sends label {label} to {path.sigma[label]}; lift the "
            "loop to the branch's covering period first")
    psis, phis = path.branch_vectors(label)
    gamma, factor = _resolved_phase(psis, phis, path.ts)
    return PhaseResult(label=label,
                       dynamical=dynamical_phase(path, label),
                       geometric=gamma,
                       holonomy_factor=factor,
                       traversals=path.curve.traversals,
                       n_samples_used=path.n_steps)


def gauge_perturb(path: SpectralPath, rescalings) -> SpectralPath:
    """Rescale the section: psi_j -> k psi_j, phi_j -> phi_j / conj(k).

    rescalings has one row per independent sample (closed paths share the
    final frame with the first, so they take n_steps rows; open paths
    n_steps + 1) and one column per label. Biorthonormality is preserved
    exactly. Gauge-invariant outputs downstream are unchanged; raw
    (section-pinned) values are not supposed to be.
    """
    arr = np.asarray(rescalings, dtype=complex)
    independent = path.n_steps if path.closed else path.n_steps + 1
    if arr.shape != (independent, path.dim):
        raise InvalidParams(
            f"rescalings must have shape ({independent}, {path.dim}), "
            f"got {arr.shape}")
    if not np.all(np.isfinite(arr.view(float))):
        raise InvalidParams("rescalings must be finite")
    if np.any(arr == 0):
        raise ZeroGauge("gauge rescalings must all be nonzero")

    frames = []
    for k in range(independent):
        frame = path.frames[k]
        frames.append(dataclasses.replace(
            frame,
            right=frame.right * arr[k][None, :],
            left=frame.left / np.conj(arr[k])[None, :]))
    if path.closed:
        frames.append(frames[0])
    return path.with_frames(frames)


def multipatch_phase(segments, transitions, label: int, *,
                     junction_tol: float = JUNCTION_TOL) -> PhaseResult:
    """Holonomy of a loop assembled from open segments and junction scalars.

    Each segment contributes its symmetrized overlap sum; each junction i
    (between segment i's end and segment i+1's start, cyclically) enters
    through the supplied transition scalar G_i relating the two local
    sections there, psi_end = G_i * psi_next_start. The total factor is
    the product of per-segment factors and transitions, which reduces to
    the single-section result when the transitions are consistent.

    Raises MismatchedJunction when a supplied transition disagrees with
    the frames actually meeting at the junction, and NonCyclicBranch when
    the chain returns the label to a different sheet.
    """
    segments = list(segments)
    transitions = [complex(g) for g in transitions]
    if not segments:
        raise InvalidParams("multipatch_phase needs at least one segment")
    if len(transitions) != len(segments):
        raise InvalidParams(
            f"need one transition per junction: {len(segments)} segments "
            f"take {len(segments)} transitions, got {len(transitions)}")
    count = len(segments)
    for i, seg in enumerate(segments):
        nxt = segments[(i + 1) % count]
        if not np.allclose(seg.points[-1], nxt.points[0], rtol=0.0, atol=1e-12):
            raise InvalidParams(
                f"segment {i} ends away from segment {(i + 1) % count}'s start")

    gamma = 0.0j
    factor = 1.0 + 0.0j
    dynamical = 0.0j
    samples_used = 0
    entry = label
    entries = []
    exits = []
    for seg in segments:
        entries.append(entry)
        psis, phis = seg.branch_vectors(entry)
        seg_gamma, seg_factor = _resolved_phase(psis, phis, seg.ts)
        gamma += seg_gamma
        factor *= seg_factor
        dynamical += dynamical_phase(seg, entry)
        samples_used += seg.n_steps
        exit_label = int(seg.branch_labels(entry)[-1])
        exits.append(exit_label)
        # frames at the shared junction point sort identically, so the
        # branch enters the next segment at the same label position
        entry = exit_label
    if entry != label:
        raise NonCyclicBranch(
            f"the chain's monodromy sends label {label} to {entry}; lift the "
            "underlying loop first")

    for i, transition in enumerate(transitions):
        if transition == 0:
            raise InvalidParams(f"transition {i} is zero")
        seg = segments[i]
        nxt = segments[(i + 1) % count]
        phi_end = seg.frames[-1].left[:, exits[i]]
        psi_next = nxt.frames[0].right[:, entries[(i + 1) % count]]
        probe = complex(np.vdot(phi_end, psi_next)) * transition
        if abs(probe - 1.0) > junction_tol:
            raise MismatchedJunction(
                f"junction {i}: supplied transition is inconsistent with the "
                f"meeting frames (|<phi_end|psi_start> * G - 1| = "
                f"{abs(probe - 1.0):.3e} > {junction_tol:.0e})")
        gamma += -1j * np.log(transition)
        factor *= transition

    return PhaseResult(label=label, dynamical=dynamical, geometric=complex(gamma),
                       holonomy_factor=complex(factor), traversals=1,
                       n_samples_used=samples_used)


def _guarded_frame(family: MatrixFamily, point, anchor: str = "max"):
    """Eigenframe at a point with the spectral-gap guard applied."""
    H = family(point)
    scale = float(np.linalg.norm(H, 2))
    solver = eig_2x2 if family.dim == 2 else eig_general
    try:
        frame = solver(H, anchor=anchor)
    except (DegenerateInput, SelfOrthogonal) as exc:
        raise NearEP(f"degenerate spectrum at point {np.asarray(point)}: "
                     f"{exc}") from exc
    if frame.gap < EP_GUARD_RTOL * max(scale, 1e-300):
        raise NearEP(
            f"spectral gap {frame.gap:.3e} below {EP_GUARD_RTOL:.0e} * |H| "
            f"at point {np.asarray(point)}")
    return frame


def default_curvature_step(family: MatrixFamily, point) -> float:
    """Finite-difference step: a small fraction of the distance to danger.

    Scales with the family's distance to its nearest known degeneracy,
    falling back to an absolute step when the locus is unknown.
    """
    if family.ep_distance is None:
        return CURVATURE_STEP_FACTOR
    distance = float(family.ep_distance(np.asarray(point, dtype=float)))
    if distance <= 0.0:
        raise NearEP("curvature requested at a known degeneracy")
    return CURVATURE_STEP_FACTOR * distance


def _derivative_matrices(family, point, h, directions):
    """Central-difference dH along the given unit directions."""
    out = []
    for direction in directions:
        step = h * direction
        out.append((family(point + step) - family(point - step)) / (2.0 * h))
    return out


def _sum_over_states(frame, d_mats, label):
    """i * sum_{m != n} [A_mu A_nu - A_nu A_mu] / (E_m - E_n)^2 for all pairs."""
    amps = [frame.left.conj().T @ dH @ frame.right for dH in d_mats]
    values = frame.values
    n = label
    count = len(d_mats)
    comps = np.zeros((count, count), dtype=complex)
    for mu in range(count):
        for nu in range(mu + 1, count):
            acc = 0.0j
            for m in range(frame.dim):
                if m == n:
                    continue
                denom = (values[m] - values[n]) ** 2
                acc += (amps[mu][n, m] * amps[nu][m, n]
                        - amps[nu][n, m] * amps[mu][m, n]) / denom
            comps[mu, nu] = 1j * acc
            comps[nu, mu] = -comps[mu, nu]
    return comps


def _plaquette_phase(family, point, label, mu, nu, h, anchor="max"):
    """Symmetrized overlap phase around a centered h x h plaquette."""
    center = _guarded_frame(family, point, anchor)
    target = center.values[label]
    corners = [(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)]
    psis = []
    phis = []
    for u, v in corners:
        p = np.array(point, dtype=float)
        p[mu] += u * h
        p[nu] += v * h
        frame = _guarded_frame(family, p, anchor)
        j = int(np.argmin(np.abs(frame.values - target)))
        psis.append(frame.right[:, j])
        phis.append(frame.left[:, j])
    psis.append(psis[0])
    phis.append(phis[0])
    gamma, _ = _resolved_phase(psis, phis, np.linspace(0.0, 1.0, 5),
                               richardson=False)
    return gamma


def curvature(family: MatrixFamily, point, label: int, h: float | None = None,
              method: str = "SumOverStates") -> CurvatureSample:
    """Curvature two-form of one branch at a parameter point.

    method "SumOverStates" combines matrix derivatives with the spectral
    decomposition; "ExteriorDerivative" differentiates the connection
    itself via gauge-invariant overlap plaquettes (phase / area). The two
    agree to O(h^2) away from degeneracies and are deliberately
    independent implementations.
    """
    point = np.asarray(point, dtype=float).reshape(-1)
    if point.shape[0] != family.param_dim:
        raise InvalidParams(
            f"point has dimension {point.shape[0]}, family expects "
            f"{family.param_dim}")
    if not 0 <= label < family.dim:
        raise InvalidParams(f"label {label} out of range for dim {family.dim}")
    if method not in ("SumOverStates", "ExteriorDerivative"):
        raise InvalidParams(f"unknown curvature method {method!r}")
    if h is None:
        h = default_curvature_step(family, point)
    h = float(h)
    if h <= 0.0 or not np.isfinite(h):
        raise InvalidParams(f"step must be positive and finite, got {h}")

    d = family.param_dim
    if method == "SumOverStates":
        frame = _guarded_frame(family, point)
        directions = [np.eye(d)[mu] for mu in range(d)]
        d_mats = _derivative_matrices(family, point, h, directions)
        comps = _sum_over_states(frame, d_mats, label)
    else:
        comps = np.zeros((d, d), dtype=complex)
        for mu in range(d):
            for nu in range(mu + 1, d):
                val = _plaquette_phase(family, point, label, mu, nu, h) / h**2
                comps[mu, nu] = val
                comps[nu, mu] = -val
    return CurvatureSample(point=point, label=label, components=comps,
                           method=method, h=h)


def _plane_curvature(family, point, label, axis_u, axis_v, h):
    """Curvature component in the (axis_u, axis_v) plane at one point."""
    frame = _guarded_frame(family, point)
    d_mats = _derivative_matrices(family, point, h, [axis_u, axis_v])
    return complex(_sum_over_states(frame, d_mats, label)[0, 1])


def stokes_check(family: MatrixFamily, small_loop, label: int, *,
                 n_samples: int = 1024, grid=STOKES_GRID,
                 anchor: str = "max") -> float:
    """|loop phase - integrated curvature| over a planar disk.

    The loop must be a constructor-made planar circle or ellipse (its
    metadata carries the plane), small enough to be contractible in the
    nondegenerate region: a loop whose monodromy permutes labels encircles
    a branch-point degeneracy and is refused. The curvature is integrated
    with the midpoint rule on a polar grid, orientation matched to the
    loop.
    """
    meta = small_loop.meta or {}
    if not meta.get("planar") or meta.get("kind") not in ("circle", "ellipse"):
        raise InvalidParams(
            "stokes_check needs a planar circle or ellipse built by the "
            "curve constructors (plane metadata required)")
    path = track(family, small_loop, n_samples, anchor=anchor)
    if not monodromy_of(path).is_identity:
        raise InvalidParams(
            "loop monodromy permutes labels: the loop encircles a "
            "degeneracy and is not contractible")
    gamma = geometric_phase(path, label).geometric

    center = np.asarray(meta["center"], dtype=float)
    axis_u, axis_v = (np.asarray(a, dtype=float) for a in meta["axes"])
    if meta["kind"] == "circle":
        scale_u = scale_v = float(meta["radius"])
    else:
        scale_u, scale_v = (float(s) for s in meta["semi_axes"])

    n_rad, n_ang = grid
    radii = (np.arange(n_rad) + 0.5) / n_rad
    angles = 2.0 * np.pi * (np.arange(n_ang) + 0.5) / n_ang
    total = 0.0j
    for r in radii:
        for th in angles:
            p = (center + r * np.cos(th) * scale_u * axis_u
                 + r * np.sin(th) * scale_v * axis_v)
            h = default_curvature_step(family, p)
            total += _plane_curvature(family, p, label, axis_u, axis_v, h) * r
    total *= scale_u * scale_v * (1.0 / n_rad) * (2.0 * np.pi / n_ang)
    if small_loop.orientation == "negative":
        total = -total
    return float(abs(gamma - total))
