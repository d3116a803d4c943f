"""Biorthonormal eigensystems of (non-Hermitian) complex matrices.

For a matrix H with simple spectrum this module produces right eigenvectors
psi_j, left eigenvectors phi_j (eigenvectors of the adjoint, paired by
conjugate eigenvalue) and normalizes them so that <phi_j|psi_k> = delta_jk.
Unlike the Hermitian case the left vectors are not the conjugates of the
right ones, and the pairing can become singular when two eigenvectors
coalesce; degeneracy classification distinguishes that case (an exceptional
point, where the matrix is defective) from an ordinary crossing with a
complete eigenbasis (a diabolic point).

Gauge convention: right vectors have unit norm and the phase is fixed by
making one anchor component real positive. The default anchor is the
largest-magnitude component (ties resolved to the lowest index); the
alternative ``anchor="first"`` uses the first component whose magnitude
exceeds a fixed fraction of the largest. The anchor choice fixes the section
a sampled path traces out, and therefore the raw (unwrapped) value of a
geometric phase; gauge-invariant quantities do not depend on it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DegenerateInput, InvalidParams, NoConvergence, SelfOrthogonal

__all__ = [
    "Eigenframe",
    "DegeneracyClass",
    "eig_2x2",
    "eig_general",
    "biorthonormalize",
    "classify_degeneracy",
    "DEGENERACY_RTOL",
    "DEFECT_TOL",
]

# Relative thresholds; all scale with the spectral norm of the input.
DEGENERACY_RTOL = 1e-8   # eigenvalue collision => DegenerateInput
# Computed eigenvalues of an exactly defective matrix split by ~sqrt(eps),
# so classification needs a default gap tolerance safely above that.
CLASSIFY_GAP_RTOL = 1e-7
DEFECT_TOL = 1e-6        # eigenvector-completeness threshold for classification
SELF_ORTHO_RTOL = 1e-12  # |<phi|psi>| below this (relative) => SelfOrthogonal
BIORTHO_TOL = 1e-9       # allowed off-diagonal residue of the pairing matrix
RESIDUAL_RTOL = 1e-10    # allowed eigen-residual per unit vector
ANCHOR_TIE_BAND = 1e-6   # magnitudes within this relative band count as tied
ANCHOR_FIRST_FLOOR = 0.25  # "first" anchor: first component >= floor * max
EP_GUARD_RTOL = 1e-6     # refuse samples whose spectral gap < this * |H|


@dataclass(frozen=True)
class Eigenframe:
    """Simple-spectrum eigensystem of one matrix.

    Attributes
    ----------
    values : (N,) complex ndarray
        Eigenvalues sorted by (real, imaginary) part.
    right : (N, N) complex ndarray
        Column j is psi_j, unit norm, phase anchored.
    left : (N, N) complex ndarray
        Column j is phi_j with <phi_j|psi_k> = delta_jk. Not unit norm: the
        biorthonormalization factor lives here.
    residual : float
        Max over j of the right/left eigen-residuals per unit vector.
    gap : float
        Minimum pairwise eigenvalue distance (inf for N = 1).
    """

    values: np.ndarray
    right: np.ndarray
    left: np.ndarray
    residual: float
    gap: float

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def copy(self) -> "Eigenframe":
        return Eigenframe(self.values.copy(), self.right.copy(), self.left.copy(),
                          self.residual, self.gap)


@dataclass(frozen=True)
class DegeneracyClass:
    """Outcome of classify_degeneracy.

    kind is one of "nondegenerate", "diabolic", "exceptional"; gap is the
    minimum eigenvalue distance and defect is 1 minus the smallest singular
    value of the column-normalized right-eigenvector matrix (0 for a
    complete orthonormal basis, 1 for a fully collapsed one).
    """

    kind: str
    gap: float
    defect: float
    values: np.ndarray = field(repr=False)


def _as_square(H) -> np.ndarray:
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise InvalidParams(f"expected a square matrix, got shape {H.shape}")
    if not np.all(np.isfinite(H.view(float))):
        raise InvalidParams("matrix has non-finite entries")
    return H


def _scale(H: np.ndarray) -> float:
    # spectral norm; cheap at these sizes and the natural scale for gaps
    s = float(np.linalg.norm(H, 2))
    return s if s > 0.0 else 1.0


def _min_gap(values: np.ndarray) -> float:
    n = values.shape[0]
    if n < 2:
        return np.inf
    diff = np.abs(values[:, None] - values[None, :])
    return float(diff[~np.eye(n, dtype=bool)].min())


def anchor_index(v: np.ndarray, anchor: str = "max") -> int:
    """Index of the component that fixes the phase of v."""
    mags = np.abs(v)
    top = mags.max()
    if top == 0.0:
        raise InvalidParams("cannot anchor a zero vector")
    if anchor == "max":
        return int(np.nonzero(mags >= (1.0 - ANCHOR_TIE_BAND) * top)[0][0])
    if anchor == "first":
        return int(np.nonzero(mags >= ANCHOR_FIRST_FLOOR * top)[0][0])
    raise InvalidParams(f"unknown anchor policy {anchor!r}")


def _fix_gauge(v: np.ndarray, anchor: str) -> np.ndarray:
    v = v / np.linalg.norm(v)
    j = anchor_index(v, anchor)
    return v * (np.conj(v[j]) / np.abs(v[j]))


def biorthonormalize(right: np.ndarray, left: np.ndarray):
    """Rescale left vectors against right ones so each pairing is exactly 1.

    Columns are treated as already-paired (psi_j, phi_j). Right vectors are
    scaled to unit norm (positive real scale only; the phase is untouched),
    then phi_j is divided by conj(<phi_j|psi_j>).

    Raises SelfOrthogonal when a pairing is numerically zero, which is the
    algebraic signature of an exceptional point.
    """
    right = np.array(right, dtype=complex, copy=True)
    left = np.array(left, dtype=complex, copy=True)
    if right.shape != left.shape or right.ndim not in (1, 2):
        raise InvalidParams("right/left must be matching vectors or column stacks")
    squeeze = right.ndim == 1
    if squeeze:
        right = right[:, None]
        left = left[:, None]
    for j in range(right.shape[1]):
        nr = np.linalg.norm(right[:, j])
        nl = np.linalg.norm(left[:, j])
        if nr == 0.0 or nl == 0.0:
            raise InvalidParams("zero vector passed to biorthonormalize")
        right[:, j] /= nr
        c = np.vdot(left[:, j], right[:, j])
        if abs(c) < SELF_ORTHO_RTOL * nl:
            raise SelfOrthogonal(
                f"pair {j}: |<phi|psi>| = {abs(c):.3e} below {SELF_ORTHO_RTOL:.0e} * |phi|")
        left[:, j] /= np.conj(c)
    if squeeze:
        return right[:, 0], left[:, 0]
    return right, left


def _assemble(values, right, left, H, scale, anchor) -> Eigenframe:
    """Sort, gauge-fix, pair-normalize and residual-check a raw eigensystem."""
    order = np.lexsort((values.imag, values.real))
    values = values[order]
    right = right[:, order]
    left = left[:, order]
    n = values.shape[0]

    for j in range(n):
        right[:, j] = _fix_gauge(right[:, j], anchor)
    right, left = biorthonormalize(right, left)

    # residual per unit vector, right and adjoint sides
    res_r = np.linalg.norm(H @ right - right * values[None, :], axis=0)
    nl = np.linalg.norm(left, axis=0)
    res_l = np.linalg.norm(H.conj().T @ left - left * np.conj(values)[None, :], axis=0) / nl
    residual = float(max(res_r.max(), res_l.max()))
    if residual > RESIDUAL_RTOL * scale:
        raise NoConvergence(f"eigen-residual {residual:.3e} exceeds "
                            f"{RESIDUAL_RTOL:.0e} * |H| = {RESIDUAL_RTOL * scale:.3e}")

    pairing = left.conj().T @ right
    off = float(np.abs(pairing - np.eye(n)).max())
    if off > BIORTHO_TOL:
        raise NoConvergence(f"biorthonormality residue {off:.3e} exceeds {BIORTHO_TOL:.0e}")

    return Eigenframe(values=values, right=right, left=left,
                      residual=residual, gap=_min_gap(values))


def eig_general(H, *, anchor: str = "max") -> Eigenframe:
    """Full biorthonormal eigensystem of a square complex matrix.

    Right vectors come from the matrix itself, left vectors independently
    from the adjoint; the two sets are paired by conjugate eigenvalue before
    the pairing is normalized. Intended for small dense matrices (the
    package exercises N <= 8).

    Raises DegenerateInput when the spectrum is not simple at relative
    tolerance DEGENERACY_RTOL.
    """
    H = _as_square(H)
    scale = _scale(H)
    values, right = np.linalg.eig(H)
    if _min_gap(values) < DEGENERACY_RTOL * scale:
        raise DegenerateInput(
            f"minimum eigenvalue gap {_min_gap(values):.3e} below "
            f"{DEGENERACY_RTOL:.0e} * |H|: degenerate or exceptional input")

    lvalues, left = np.linalg.eig(H.conj().T)
    # pair adjoint eigenvalues (conjugated) to the right ones
    cost = np.abs(np.conj(lvalues)[:, None] - values[None, :])
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty_like(rows)
    perm[cols] = rows
    left = left[:, perm]

    return _assemble(values, right, left, H, scale, anchor)


def eig_2x2(H, *, anchor: str = "max") -> Eigenframe:
    """Closed-form biorthonormal eigensystem of a 2 x 2 matrix.

    Splits H into (tr H / 2) * I plus a traceless part [[a, b], [c, -a]],
    takes f = sqrt(a^2 + b c) (principal branch) and builds eigenvectors
    from whichever of the two standard patch forms is better conditioned at
    this point. Same output contract and gauge as eig_general.
    """
    H = _as_square(H)
    if H.shape != (2, 2):
        raise InvalidParams(f"eig_2x2 needs a 2x2 matrix, got {H.shape}")
    scale = _scale(H)
    shift = 0.5 * (H[0, 0] + H[1, 1])
    a = 0.5 * (H[0, 0] - H[1, 1])
    b = H[0, 1]
    c = H[1, 0]
    f = np.sqrt(a * a + b * c)
    if abs(f) < 0.5 * DEGENERACY_RTOL * scale:
        raise DegenerateInput(
            f"eigenvalue gap 2|f| = {2 * abs(f):.3e} below {DEGENERACY_RTOL:.0e} * |H|")

    if abs(f + a) >= abs(f - a):
        psi_p = np.array([f + a, c])
        psi_m = np.array([-b, f + a])
    else:
        psi_p = np.array([-b, a - f])
        psi_m = np.array([a - f, c])
    values = np.array([shift + f, shift - f])
    right = np.stack([psi_p, psi_m], axis=1)
    # left vectors by cross-orthogonality: phi_+ is the conjugate
    # perpendicular of psi_-, and vice versa; pairing fixed downstream.
    left = np.stack([
        np.conj([psi_m[1], -psi_m[0]]),
        np.conj([psi_p[1], -psi_p[0]]),
    ], axis=1)
    return _assemble(values, right, left, H, scale, anchor)


def classify_degeneracy(H, tol: float | None = None) -> DegeneracyClass:
    """Classify the spectrum of H at a point.

    Returns kind "nondegenerate" when the minimum eigenvalue gap exceeds
    tol (default CLASSIFY_GAP_RTOL * |H|, which sits above the ~sqrt(eps)
    splitting that floating point inflicts on exactly defective matrices).
    For a degenerate spectrum, each eigenvalue cluster is tested for full
    geometric multiplicity by counting small singular values of
    H - center*I; full multiplicity everywhere is a diabolic point,
    anything less an exceptional point. The reported ``defect``
    (1 - smallest singular value of the column-normalized eigenvector
    matrix) is a diagnostic: inside a degenerate eigenspace the computed
    basis is arbitrary, so its value is not reliable at diabolic points.
    """
    H = _as_square(H)
    scale = _scale(H)
    if tol is None:
        tol = CLASSIFY_GAP_RTOL * scale
    values, vectors = np.linalg.eig(H)
    gap = _min_gap(values)

    # Diagnostic only: at a diabolic point the computed eigenbasis inside the
    # degenerate eigenspace is arbitrary, so this number is noisy there.
    norms = np.linalg.norm(vectors, axis=0)
    defect = 1.0 - float(np.linalg.svd(vectors / norms[None, :], compute_uv=False)[-1])

    if gap > tol:
        return DegeneracyClass(kind="nondegenerate", gap=gap, defect=defect, values=values)

    # Degenerate: diabolic iff every eigenvalue cluster has full geometric
    # multiplicity. Singular values are unitary invariants, which makes this
    # decision stable under similarity rotations (unlike the raw defect).
    kind = "diabolic"
    remaining = list(range(values.shape[0]))
    while remaining:
        seed = remaining.pop(0)
        cluster = [seed]
        for j in list(remaining):
            if abs(values[j] - values[seed]) <= tol:
                cluster.append(j)
                remaining.remove(j)
        if len(cluster) < 2:
            continue
        center = values[cluster].mean()
        # a diagonalizable cluster of radius r contributes singular values
        # O(r), so the "numerically zero" threshold must track the spread
        radius = float(np.max(np.abs(values[cluster] - center)))
        cutoff = max(DEFECT_TOL * scale, 2.0 * radius)
        sigma = np.linalg.svd(H - center * np.eye(H.shape[0]), compute_uv=False)
        geometric = int(np.sum(sigma < cutoff))
        if geometric < len(cluster):
            kind = "exceptional"
            break
    return DegeneracyClass(kind=kind, gap=gap, defect=defect, values=values)
