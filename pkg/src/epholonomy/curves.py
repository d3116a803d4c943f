"""Parameter-space curves: closed loops, segments, and their sampling.

A curve is a map t in [0, 1] -> point in R^d together with bookkeeping:
whether it closes, its traversal orientation, the physical duration of one
pass (``base_period``), and the covering multiplicity already folded into
the map (``traversals``, > 1 for lifted loops that wind around a base loop
several times). Constructors guarantee the closure invariant map(0) ==
map(1) *exactly* by reducing the angular argument modulo one period, so
downstream code may identify the first and last samples of a closed curve
without any tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidParams, InvalidSampling

__all__ = [
    "CurveSpec",
    "circle",
    "ellipse",
    "fourier_loop",
    "polyline",
    "parametric_polynomial",
    "reversed_curve",
    "subcurve",
    "concatenate",
    "lift",
    "discretize",
    "MIN_SAMPLES",
]

MIN_SAMPLES = 8  # discretize refuses coarser grids


@dataclass(frozen=True)
class CurveSpec:
    """A parameterized curve in d-dimensional real parameter space.

    Attributes
    ----------
    map : callable
        t in [0, 1] -> (d,) float ndarray. Must be continuous; closed
        curves must satisfy map(0) == map(1) exactly.
    dim : int
        Dimension d of the ambient parameter space.
    closed : bool
        Whether the curve is a loop.
    orientation : str
        "positive" or "negative"; records the traversal sense relative to
        the curve's construction (reversal flips it).
    base_period : float
        Physical duration of one full pass of t from 0 to 1. A lifted
        curve's map already winds ``traversals`` times, and its
        base_period is the total duration of all windings.
    traversals : int
        Covering multiplicity folded into the map (1 for ordinary curves).
    meta : dict
        Construction metadata (kind, center, radius, plane axes, ...);
        consumed by plotting and by planar-loop quadrature.
    """

    map: Callable[[float], np.ndarray]
    dim: int
    closed: bool
    orientation: str = "positive"
    base_period: float = 1.0
    traversals: int = 1
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidParams(f"curve dimension must be positive, got {self.dim}")
        if self.orientation not in ("positive", "negative"):
            raise InvalidParams(f"orientation must be positive/negative, got {self.orientation!r}")
        if not (self.base_period > 0.0):
            raise InvalidParams(f"base_period must be > 0, got {self.base_period}")
        if self.traversals < 1:
            raise InvalidParams(f"traversals must be >= 1, got {self.traversals}")
        p0 = self.point(0.0)
        if p0.shape != (self.dim,):
            raise InvalidParams(
                f"map returns shape {p0.shape}, expected ({self.dim},)")
        if self.closed and not np.array_equal(p0, self.point(1.0)):
            raise InvalidParams("closed curve must satisfy map(0) == map(1) exactly")

    def point(self, t: float) -> np.ndarray:
        """Evaluate the curve map at t as a (dim,) float array."""
        return np.asarray(self.map(t), dtype=float).reshape(-1)


def _unit_axes(dim: int, axes) -> tuple[np.ndarray, np.ndarray]:
    """Two orthonormal in-plane axes; defaults to the first two coordinates."""
    if axes is None:
        if dim < 2:
            raise InvalidParams("planar curves need dim >= 2")
        u = np.zeros(dim)
        v = np.zeros(dim)
        u[0] = 1.0
        v[1] = 1.0
        return u, v
    u = np.asarray(axes[0], dtype=float).reshape(-1)
    v = np.asarray(axes[1], dtype=float).reshape(-1)
    if u.shape != (dim,) or v.shape != (dim,):
        raise InvalidParams("plane axes must match the curve dimension")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0 or abs(np.dot(u, v)) > 1e-12 * nu * nv:
        raise InvalidParams("plane axes must be nonzero and orthogonal")
    return u / nu, v / nv


def circle(center, radius: float, *, axes=None, phase: float = 0.0,
           base_period: float = 1.0, orientation: str = "positive") -> CurveSpec:
    """Circle of given radius about center, in the plane spanned by axes.

    The angle runs counterclockwise (in the (axes[0], axes[1]) frame) from
    ``phase`` for positive orientation, clockwise for negative.
    """
    center = np.asarray(center, dtype=float).reshape(-1)
    if radius <= 0.0:
        raise InvalidParams(f"radius must be positive, got {radius}")
    dim = center.shape[0]
    u, v = _unit_axes(dim, axes)
    sign = 1.0 if orientation == "positive" else -1.0

    def mapper(t, _c=center, _u=u, _v=v, _r=radius, _p=phase, _s=sign):
        theta = _p + _s * 2.0 * np.pi * (t % 1.0)
        return _c + _r * (np.cos(theta) * _u + np.sin(theta) * _v)

    meta = {"kind": "circle", "center": center, "radius": float(radius),
            "axes": (u, v), "planar": True}
    return CurveSpec(map=mapper, dim=dim, closed=True, orientation=orientation,
                     base_period=base_period, meta=meta)


def ellipse(center, semi_axes, *, axes=None, phase: float = 0.0,
            base_period: float = 1.0, orientation: str = "positive") -> CurveSpec:
    """Axis-aligned ellipse in the plane spanned by axes."""
    center = np.asarray(center, dtype=float).reshape(-1)
    ra, rb = float(semi_axes[0]), float(semi_axes[1])
    if ra <= 0.0 or rb <= 0.0:
        raise InvalidParams(f"semi-axes must be positive, got {semi_axes}")
    dim = center.shape[0]
    u, v = _unit_axes(dim, axes)
    sign = 1.0 if orientation == "positive" else -1.0

    def mapper(t, _c=center, _u=u, _v=v, _a=ra, _b=rb, _p=phase, _s=sign):
        theta = _p + _s * 2.0 * np.pi * (t % 1.0)
        return _c + _a * np.cos(theta) * _u + _b * np.sin(theta) * _v

    meta = {"kind": "ellipse", "center": center, "semi_axes": (ra, rb),
            "axes": (u, v), "planar": True}
    return CurveSpec(map=mapper, dim=dim, closed=True, orientation=orientation,
                     base_period=base_period, meta=meta)


def fourier_loop(center, radius: float, cos_amps=(), sin_amps=(), *, axes=None,
                 base_period: float = 1.0, orientation: str = "positive") -> CurveSpec:
    """Smoothly perturbed circle: radius modulated by a finite Fourier series.

    r(theta) = radius + sum_k cos_amps[k] cos((k+1) theta)
                      + sum_k sin_amps[k] sin((k+1) theta).

    Useful for loop-deformation (homotopy) tests: keep the total amplitude
    below the distance to the nearest degeneracy and the loop class is
    unchanged.
    """
    center = np.asarray(center, dtype=float).reshape(-1)
    cos_amps = np.asarray(cos_amps, dtype=float).reshape(-1)
    sin_amps = np.asarray(sin_amps, dtype=float).reshape(-1)
    if radius <= 0.0:
        raise InvalidParams(f"radius must be positive, got {radius}")
    if np.sum(np.abs(cos_amps)) + np.sum(np.abs(sin_amps)) >= radius:
        raise InvalidParams("perturbation amplitudes must stay below the radius")
    dim = center.shape[0]
    u, v = _unit_axes(dim, axes)
    sign = 1.0 if orientation == "positive" else -1.0

    def mapper(t, _c=center, _u=u, _v=v, _r=radius, _ca=cos_amps, _sa=sin_amps, _s=sign):
        theta = _s * 2.0 * np.pi * (t % 1.0)
        r = _r
        for k, amp in enumerate(_ca):
            r = r + amp * np.cos((k + 1) * theta)
        for k, amp in enumerate(_sa):
            r = r + amp * np.sin((k + 1) * theta)
        return _c + r * (np.cos(theta) * _u + np.sin(theta) * _v)

    meta = {"kind": "fourier_loop", "center": center, "radius": float(radius),
            "axes": (u, v), "planar": True}
    return CurveSpec(map=mapper, dim=dim, closed=True, orientation=orientation,
                     base_period=base_period, meta=meta)


def polyline(vertices, *, closed: bool = False, base_period: float = 1.0) -> CurveSpec:
    """Piecewise-linear curve through the given vertices.

    Each segment gets an equal share of the parameter interval. A closed
    polyline appends the segment back to the first vertex; do not repeat
    the first vertex manually.
    """
    pts = np.asarray(vertices, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise InvalidParams("polyline needs at least two vertices")
    if closed:
        pts = np.vstack([pts, pts[0]])
    nseg = pts.shape[0] - 1

    def mapper(t, _p=pts, _n=nseg):
        s = min(max(t, 0.0), 1.0) * _n
        k = min(int(s), _n - 1)
        w = s - k
        # endpoints hit vertices exactly (w == 0 or 1 gives a pure vertex)
        if w == 0.0:
            return _p[k].copy()
        return (1.0 - w) * _p[k] + w * _p[k + 1]

    meta = {"kind": "polyline", "vertices": pts}
    return CurveSpec(map=mapper, dim=pts.shape[1], closed=closed,
                     base_period=base_period, meta=meta)


def parametric_polynomial(coeffs, *, closed: bool = False,
                          base_period: float = 1.0) -> CurveSpec:
    """Curve with polynomial coordinates: point_i(t) = sum_k coeffs[i, k] t^k.

    coeffs has shape (d, degree+1), low order first. A closed request is
    validated against exact endpoint equality.
    """
    rows = [np.asarray(row, dtype=float).reshape(-1) for row in coeffs]
    if not rows or any(row.shape[0] < 1 for row in rows):
        raise InvalidParams("coeffs must be one nonempty coefficient list per coordinate")
    polys = [np.polynomial.Polynomial(row) for row in rows]

    def mapper(t, _polys=polys):
        return np.array([p(t) for p in _polys])

    meta = {"kind": "parametric_polynomial", "coeffs": rows}
    return CurveSpec(map=mapper, dim=len(rows), closed=closed,
                     base_period=base_period, meta=meta)


def reversed_curve(curve: CurveSpec) -> CurveSpec:
    """The same trace traversed backwards (t -> 1 - t), orientation flipped."""
    flipped = "negative" if curve.orientation == "positive" else "positive"

    def mapper(t, _m=curve.map):
        return _m(1.0 - t)

    return CurveSpec(map=mapper, dim=curve.dim, closed=curve.closed,
                     orientation=flipped, base_period=curve.base_period,
                     traversals=curve.traversals, meta=dict(curve.meta))


def subcurve(curve: CurveSpec, t0: float, t1: float) -> CurveSpec:
    """The open segment of curve between parameters t0 < t1 (within [0, 1])."""
    if not (0.0 <= t0 < t1 <= 1.0):
        raise InvalidParams(f"need 0 <= t0 < t1 <= 1, got ({t0}, {t1})")

    def mapper(t, _m=curve.map, _a=t0, _b=t1):
        return _m(_a + (_b - _a) * t)

    meta = dict(curve.meta)
    meta["segment_of"] = (t0, t1)
    return CurveSpec(map=mapper, dim=curve.dim, closed=False,
                     orientation=curve.orientation,
                     base_period=curve.base_period * (t1 - t0),
                     traversals=curve.traversals, meta=meta)


def concatenate(curves, *, closed: bool | None = None) -> CurveSpec:
    """Join curves end to start; junction points must match exactly.

    Each piece gets a parameter share proportional to its base_period. If
    ``closed`` is omitted it is inferred from exact equality of the overall
    endpoints.
    """
    curves = list(curves)
    if not curves:
        raise InvalidParams("concatenate needs at least one curve")
    dim = curves[0].dim
    for c in curves:
        if c.dim != dim:
            raise InvalidParams("concatenated curves must share a parameter space")
    for a, b in zip(curves, curves[1:]):
        if not np.array_equal(a.point(1.0), b.point(0.0)):
            raise InvalidParams("curve junction points must match exactly")
    durations = np.array([c.base_period for c in curves])
    total = float(durations.sum())
    breaks = np.concatenate([[0.0], np.cumsum(durations) / total])
    breaks[-1] = 1.0

    start = curves[0].point(0.0)
    end = curves[-1].point(1.0)
    if closed is None:
        closed = bool(np.array_equal(start, end))

    def mapper(t, _cs=curves, _b=breaks):
        t = min(max(t, 0.0), 1.0)
        k = min(int(np.searchsorted(_b, t, side="right")) - 1, len(_cs) - 1)
        span = _b[k + 1] - _b[k]
        return _cs[k].map((t - _b[k]) / span)

    meta = {"kind": "concatenation", "pieces": len(curves)}
    return CurveSpec(map=mapper, dim=dim, closed=closed,
                     base_period=total, meta=meta)


def lift(curve: CurveSpec, k: int) -> CurveSpec:
    """The loop traversed k times in one parameter pass.

    The lifted map winds k times as t runs over [0, 1]; base_period scales
    by k so the physical speed along the loop is unchanged.
    """
    if not curve.closed:
        raise InvalidParams("only closed curves can be lifted")
    if k < 1:
        raise InvalidParams(f"lift multiplicity must be >= 1, got {k}")
    if k == 1:
        return curve

    def mapper(t, _m=curve.map, _k=k):
        return _m((_k * t) % 1.0)

    meta = dict(curve.meta)
    meta["lift_of"] = curve.traversals
    return CurveSpec(map=mapper, dim=curve.dim, closed=True,
                     orientation=curve.orientation,
                     base_period=curve.base_period * k,
                     traversals=curve.traversals * k, meta=meta)


def discretize(curve: CurveSpec, n_samples: int):
    """Uniform sampling: n_samples steps, n_samples + 1 sample points.

    Returns (ts, points) with ts = 0, 1/n, ..., 1 and points[k] =
    map(ts[k]). For a closed curve the final point *is* the first point
    (copied bit for bit), so phase products may identify the two without
    tolerance.
    """
    if n_samples < MIN_SAMPLES:
        raise InvalidSampling(f"need at least {MIN_SAMPLES} samples, got {n_samples}")
    ts = np.linspace(0.0, 1.0, n_samples + 1)
    points = np.empty((n_samples + 1, curve.dim))
    for k, t in enumerate(ts):
        points[k] = curve.point(float(t))
    if curve.closed:
        points[-1] = points[0]
    return ts, points
