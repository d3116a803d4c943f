"""Eigenvalue-branch continuation along parameter curves.

A matrix family evaluated along a sampled curve gives one eigensystem per
sample, but the eigenvalues arrive sorted by value, not by branch: around a
branch-point degeneracy the sorted labels swap even though each analytic
branch is perfectly smooth. This module matches labels between adjacent
samples by minimal total eigenvalue displacement, certifies each matching
as locally unambiguous (bisecting the step against cached frames until it
is), and composes the step matchings into the loop's monodromy
permutation. The permutation's cycle lengths are the covering periods: a
label returns to itself only after its cycle length of traversals, which
is what :func:`lift_closed` arranges.

Matchings act left-to-right along increasing curve parameter, and the
monodromy of a closed curve maps start labels to end labels; for loops
``c1`` then ``c2`` sharing a base point this makes
``sigma(c1 . c2) = sigma(c2) o sigma(c1)``.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .curves import CurveSpec, discretize
from .curves import lift as lift_curve
from .errors import (AmbiguousMatching, DegenerateInput, InvalidParams,
                     NearEP, OpenCurve, SelfOrthogonal)
from .families import MatrixFamily
from .linalg import EP_GUARD_RTOL, Eigenframe, eig_2x2, eig_general

__all__ = [
    "SpectralPath",
    "Monodromy",
    "track",
    "monodromy_of",
    "lift_closed",
    "monodromy_group",
    "MAX_REFINE_DEPTH",
    "AMBIGUITY_FACTOR",
]

MAX_REFINE_DEPTH = 20    # step bisection levels before giving up
AMBIGUITY_FACTOR = 2.0   # second-best assignment must cost at least this x best
# permutations enumerated exhaustively up to this dimension, assignment
# solver (with one-forbidden-edge second best) above it
EXHAUSTIVE_DIM = 5


@dataclass(frozen=True)
class SpectralPath:
    """Eigensystems along a sampled curve with branch-matched labels.

    Attributes
    ----------
    curve : CurveSpec
        The parameter curve that was tracked.
    ts : (n+1,) float ndarray
        Sample parameters, t_0 = 0 and t_n = 1.
    points : (n+1, d) float ndarray
        Curve points at the samples; for closed curves the last row reuses
        the first exactly.
    frames : tuple of Eigenframe
        One eigensystem per sample. For closed curves the last entry is
        the first object, so the loop closes without any re-identification
        tolerance.
    matchings : tuple of tuple of int
        matchings[k][j] is the label at sample k+1 continuing label j at
        sample k.
    sigma : tuple of int
        Composition of all step matchings (identity for open curves):
        the monodromy permutation, start labels to end labels.
    refinement_depth : int
        Deepest step bisection that was needed to certify a matching.
    min_gap : float
        Smallest spectral gap seen over all evaluated frames, refinement
        frames included.
    anchor : str
        Gauge anchor policy the frames were built with.
    """

    curve: CurveSpec
    ts: np.ndarray
    points: np.ndarray
    frames: tuple
    matchings: tuple
    sigma: tuple
    refinement_depth: int
    min_gap: float
    anchor: str

    @property
    def dim(self) -> int:
        return self.frames[0].dim

    @property
    def n_steps(self) -> int:
        return len(self.matchings)

    @property
    def closed(self) -> bool:
        return self.curve.closed

    def branch_labels(self, label: int) -> np.ndarray:
        """Label positions of one branch at every sample.

        Entry k is where the branch that started at ``label`` sits inside
        frame k; entry 0 is ``label`` itself and entry n is sigma(label).
        """
        self._check_label(label)
        out = np.empty(self.n_steps + 1, dtype=int)
        out[0] = label
        for k, match in enumerate(self.matchings):
            out[k + 1] = match[out[k]]
        return out

    def eigenvalues(self, label: int) -> np.ndarray:
        """Eigenvalue continuation of one branch at every sample."""
        labels = self.branch_labels(label)
        return np.array([frame.values[j]
                         for frame, j in zip(self.frames, labels)])

    def branch_vectors(self, label: int):
        """Right and left vector sequences (psis, phis) of one branch."""
        labels = self.branch_labels(label)
        psis = [frame.right[:, j] for frame, j in zip(self.frames, labels)]
        phis = [frame.left[:, j] for frame, j in zip(self.frames, labels)]
        return psis, phis

    def with_frames(self, frames) -> "SpectralPath":
        """Same path with the frames replaced (used by gauge deformations)."""
        frames = tuple(frames)
        if len(frames) != len(self.frames):
            raise InvalidParams(
                f"expected {len(self.frames)} frames, got {len(frames)}")
        return dataclasses.replace(self, frames=frames)

    def _check_label(self, label: int) -> None:
        if not 0 <= label < self.dim:
            raise InvalidParams(
                f"label {label} out of range for dimension {self.dim}")


@dataclass(frozen=True)
class Monodromy:
    """A permutation of spectral labels with its cycle data.

    sigma maps start labels to end labels; cycle_structure lists the
    cycles (each rotated to start at its smallest label, sorted by that
    label); periods[j] is the length of the cycle through j, the number
    of loop traversals after which branch j first returns to itself.
    """

    sigma: tuple
    cycle_structure: tuple
    periods: tuple

    @classmethod
    def from_sigma(cls, sigma) -> "Monodromy":
        sigma = tuple(int(j) for j in sigma)
        n = len(sigma)
        if sorted(sigma) != list(range(n)):
            raise InvalidParams(f"{sigma} is not a permutation of 0..{n - 1}")
        seen = [False] * n
        cycles = []
        for start in range(n):
            if seen[start]:
                continue
            cycle = [start]
            seen[start] = True
            j = sigma[start]
            while j != start:
                cycle.append(j)
                seen[j] = True
                j = sigma[j]
            cycles.append(tuple(cycle))
        periods = [0] * n
        for cycle in cycles:
            for j in cycle:
                periods[j] = len(cycle)
        return cls(sigma=sigma, cycle_structure=tuple(cycles),
                   periods=tuple(periods))

    @property
    def order(self) -> int:
        return math.lcm(*(len(c) for c in self.cycle_structure))

    @property
    def is_identity(self) -> bool:
        return all(s == j for j, s in enumerate(self.sigma))

    def cycle_notation(self) -> str:
        """One-based cycle string, fixed points omitted: "(1 2)" or "id"."""
        parts = ["(" + " ".join(str(j + 1) for j in cycle) + ")"
                 for cycle in self.cycle_structure if len(cycle) > 1]
        return "".join(parts) if parts else "id"


def _compose(first, then) -> tuple:
    """Permutation doing `first`, then `then` (left-to-right action)."""
    return tuple(then[j] for j in first)


def _best_two_assignments(values_a: np.ndarray, values_b: np.ndarray):
    """Cheapest and second-cheapest label matchings between two spectra.

    Cost of a matching is the summed eigenvalue displacement. Returns
    (best permutation, best cost, second-best cost, largest single
    displacement of the best matching).
    """
    cost = np.abs(values_a[:, None] - values_b[None, :])
    n = cost.shape[0]
    if n == 1:
        return (0,), float(cost[0, 0]), np.inf, float(cost[0, 0])

    if n <= EXHAUSTIVE_DIM:
        best_perm = None
        best = second = np.inf
        idx = np.arange(n)
        for perm in itertools.permutations(range(n)):
            total = float(cost[idx, perm].sum())
            if total < best:
                best_perm, second, best = perm, best, total
            elif total < second:
                second = total
        worst = float(cost[idx, list(best_perm)].max())
        return best_perm, best, second, worst

    rows, cols = linear_sum_assignment(cost)
    best_perm = tuple(int(c) for c in cols)
    best = float(cost[rows, cols].sum())
    second = np.inf
    big = 4.0 * cost.sum() + 1.0
    for i in range(n):
        mutated = cost.copy()
        mutated[i, cols[i]] = big  # forbid one edge of the optimum
        r2, c2 = linear_sum_assignment(mutated)
        total = float(mutated[r2, c2].sum())
        if total < second:
            second = total
    worst = float(cost[rows, cols].max())
    return best_perm, best, second, worst


class _Tracker:
    """Shared state for one track() call: frame cache and refinement stats."""

    def __init__(self, family: MatrixFamily, curve: CurveSpec, anchor: str,
                 frame_fn):
        self.family = family
        self.curve = curve
        self.anchor = anchor
        self.frame_fn = frame_fn
        self.cache: dict = {}
        self.min_gap = np.inf
        self.depth_used = 0

    def frame_at(self, t: float) -> Eigenframe:
        hit = self.cache.get(t)
        if hit is not None:
            return hit
        H = self.family(self.curve.point(t))
        scale = float(np.linalg.norm(H, 2))
        try:
            frame = self.frame_fn(H, anchor=self.anchor)
        except (DegenerateInput, SelfOrthogonal) as exc:
            raise NearEP(
                f"sample t = {t:.9g} sits at a spectral degeneracy: {exc}"
            ) from exc
        if frame.gap < EP_GUARD_RTOL * max(scale, 1e-300):
            raise NearEP(
                f"sample t = {t:.9g}: spectral gap {frame.gap:.3e} below "
                f"{EP_GUARD_RTOL:.0e} * |H| = {EP_GUARD_RTOL * scale:.3e}")
        self.min_gap = min(self.min_gap, frame.gap)
        self.cache[t] = frame
        return frame

    def resolve(self, t_a: float, frame_a: Eigenframe, t_b: float,
                frame_b: Eigenframe, depth: int) -> tuple:
        """Certified matching from frame_a to frame_b, bisecting as needed."""
        perm, best, second, worst = _best_two_assignments(
            frame_a.values, frame_b.values)
        gap = min(frame_a.gap, frame_b.gap)
        if second >= AMBIGUITY_FACTOR * best and worst < 0.5 * gap:
            return perm
        if depth >= MAX_REFINE_DEPTH:
            raise AmbiguousMatching(
                f"matching stays ambiguous on t in [{t_a:.9g}, {t_b:.9g}] "
                f"after {MAX_REFINE_DEPTH} bisections (best {best:.3e}, "
                f"second best {second:.3e}, max displacement {worst:.3e}, "
                f"gap {gap:.3e})")
        self.depth_used = max(self.depth_used, depth + 1)
        t_m = 0.5 * (t_a + t_b)
        frame_m = self.frame_at(t_m)
        left = self.resolve(t_a, frame_a, t_m, frame_m, depth + 1)
        right = self.resolve(t_m, frame_m, t_b, frame_b, depth + 1)
        return _compose(left, right)


def track(family: MatrixFamily, curve: CurveSpec, n_samples: int, *,
          anchor: str = "max", frame_fn=None) -> SpectralPath:
    """Eigensystems along a curve with certified branch matchings.

    Samples the curve uniformly, builds the biorthonormal frame at every
    sample, and matches labels across each step by minimal total
    eigenvalue displacement. A step is accepted only when the second-best
    matching costs at least twice the best one and no matched eigenvalue
    moves by more than half the local spectral gap; otherwise the step is
    bisected (frames at the midpoints are used to certify the matching,
    but only the requested samples enter the returned path). For closed
    curves the final frame is the first object, and the composed step
    matchings give the monodromy permutation.

    Parameters
    ----------
    family : MatrixFamily
    curve : CurveSpec
    n_samples : int
        Number of steps; the path holds n_samples + 1 samples.
    anchor : {"max", "first"}
        Phase-anchor policy handed to the eigensolver; it selects the
        section the path traces and with it the raw geometric phase.
    frame_fn : callable, optional
        Replacement eigensolver with the signature of eig_general.

    Raises
    ------
    NearEP
        If any evaluated sample (refinement midpoints included) has a
        spectral gap below the guard tolerance.
    AmbiguousMatching
        If a step cannot be certified within the bisection budget.
    """
    if frame_fn is None:
        frame_fn = eig_2x2 if family.dim == 2 else eig_general
    state = _Tracker(family, curve, anchor, frame_fn)

    ts, points = discretize(curve, n_samples)
    frames = [state.frame_at(float(t)) for t in ts[:-1]]
    if curve.closed:
        frames.append(frames[0])
    else:
        frames.append(state.frame_at(float(ts[-1])))

    matchings = []
    for k in range(n_samples):
        matchings.append(state.resolve(float(ts[k]), frames[k],
                                       float(ts[k + 1]), frames[k + 1], 0))

    sigma = tuple(range(family.dim))
    if curve.closed:
        for match in matchings:
            sigma = _compose(sigma, match)

    return SpectralPath(curve=curve, ts=ts, points=points,
                        frames=tuple(frames), matchings=tuple(matchings),
                        sigma=sigma, refinement_depth=state.depth_used,
                        min_gap=float(state.min_gap), anchor=anchor)


def monodromy_of(path: SpectralPath) -> Monodromy:
    """Monodromy permutation of a closed tracked path, with cycle data.

    Raises OpenCurve when the path's curve is not closed (an open path
    has no basepoint-preserving holonomy to speak of).
    """
    if not path.closed:
        raise OpenCurve("monodromy is defined for closed curves only")
    return Monodromy.from_sigma(path.sigma)


def lift_closed(curve: CurveSpec, label: int, monodromy: Monodromy) -> CurveSpec:
    """The curve traversed as many times as the label needs to close.

    The traversal count is the label's cycle length in the monodromy;
    the lifted curve's base_period grows by the same factor, so physical
    time still covers every traversal.
    """
    if not 0 <= label < len(monodromy.periods):
        raise InvalidParams(
            f"label {label} out of range for {len(monodromy.periods)} branches")
    return lift_curve(curve, monodromy.periods[label])


def monodromy_group(family: MatrixFamily, loops, *, n_samples: int = 512,
                    anchor: str = "max"):
    """Permutation group generated by the loops' monodromies.

    All loops must be closed and share their start point (the common base
    point of the generated group). Returns (frozenset of permutations,
    group order); with no loops the group is trivial.
    """
    loops = list(loops)
    identity = tuple(range(family.dim))
    group = {identity}
    if loops:
        base = np.asarray(loops[0].point(0.0), dtype=float)
        for loop in loops:
            if not loop.closed:
                raise OpenCurve("monodromy_group needs closed loops")
            if not np.allclose(loop.point(0.0), base, rtol=0.0, atol=1e-12):
                raise InvalidParams("loops must share a base point")
        generators = {track(family, loop, n_samples, anchor=anchor).sigma
                      for loop in loops}
        while True:
            grown = {_compose(a, g) for a in group for g in generators} - group
            if not grown:
                break
            group |= grown
    return frozenset(group), len(group)
