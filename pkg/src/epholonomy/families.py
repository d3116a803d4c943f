"""Parameterized matrix families: point in R^d -> N x N complex matrix.

The built-in registry collects the small non-Hermitian families used
throughout the test-suite and the command line: two-level systems whose
eigenvalue pair ±f(z) winds around a square-root branch point, a 3 x 3
block variant, complex-symmetric families whose loop holonomy is a pure
sign, non-symmetric families with closed-form geometric phases, a
three-parameter decaying two-level system whose degeneracies form a circle,
and the Hermitian spin-1/2 reference family.

Planar families read the parameter point (x, y) as the complex number
z = x + iy; three-parameter families use (R1, R2, R3) directly. Each
family carries its known degeneracy locus as a distance callable so
numerical guards and finite-difference steps can scale with the distance
to the nearest degeneracy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidParams

__all__ = [
    "MatrixFamily",
    "example_family",
    "polynomial_family",
    "BUILTIN_FAMILIES",
    "as_complex",
]


def as_complex(point) -> complex:
    """Read a 2-vector parameter point as z = x + i y."""
    p = np.asarray(point, dtype=float).reshape(-1)
    if p.shape != (2,):
        raise InvalidParams(f"expected a planar point, got shape {p.shape}")
    return complex(p[0], p[1])


@dataclass(frozen=True)
class MatrixFamily:
    """A smooth map from parameter points to complex square matrices.

    Attributes
    ----------
    name : str
        Registry or construction name.
    dim : int
        Matrix size N.
    param_dim : int
        Parameter-space dimension d.
    matrix : callable
        point (d,) -> (N, N) complex ndarray.
    hermitian : bool
        Whether every matrix of the family is Hermitian.
    ep_distance : callable or None
        point -> distance to the nearest known degeneracy of the family
        (None when the locus is unknown); used to scale guards and
        finite-difference steps.
    meta : dict
        Free-form metadata, e.g. a description of the degeneracy locus.
    """

    name: str
    dim: int
    param_dim: int
    matrix: Callable[[np.ndarray], np.ndarray]
    hermitian: bool = False
    ep_distance: Callable[[np.ndarray], float] | None = None
    meta: dict = field(default_factory=dict)

    def __call__(self, point) -> np.ndarray:
        p = np.asarray(point, dtype=float).reshape(-1)
        if p.shape != (self.param_dim,):
            raise InvalidParams(
                f"family {self.name!r} expects points of dimension "
                f"{self.param_dim}, got shape {p.shape}")
        H = np.asarray(self.matrix(p), dtype=complex)
        if H.shape != (self.dim, self.dim):
            raise InvalidParams(
                f"family {self.name!r} produced shape {H.shape}, "
                f"expected ({self.dim}, {self.dim})")
        return H


def _sqrt_branch() -> MatrixFamily:
    # spectrum ±sqrt(z): one branch point at the origin
    def matrix(p):
        z = as_complex(p)
        return np.array([[0.0, 1.0], [z, 0.0]], dtype=complex)

    return MatrixFamily(
        name="sqrt_branch", dim=2, param_dim=2, matrix=matrix,
        ep_distance=lambda p: abs(as_complex(p)),
        meta={"degeneracy_locus": "single exceptional point at z = 0"})


def _block_three() -> MatrixFamily:
    # spectrum {z, +sqrt(z), -sqrt(z)}: branch point at 0, ordinary
    # (non-defective) crossing of z with +sqrt(z) at z = 1
    def matrix(p):
        z = as_complex(p)
        return np.array([[z, 0.0, 0.0],
                         [0.0, 0.0, 1.0],
                         [0.0, z, 0.0]], dtype=complex)

    def distance(p):
        z = as_complex(p)
        return min(abs(z), abs(z - 1.0))

    return MatrixFamily(
        name="block_three", dim=3, param_dim=2, matrix=matrix,
        ep_distance=distance,
        meta={"degeneracy_locus":
              "exceptional point at z = 0; diabolic crossing at z = 1"})


def _sym_a() -> MatrixFamily:
    # complex symmetric; eigenvalues ±2 sqrt(z)
    def matrix(p):
        z = as_complex(p)
        return np.array([[1.0 + z, 1j * (1.0 - z)],
                         [1j * (1.0 - z), -(1.0 + z)]], dtype=complex)

    return MatrixFamily(
        name="sym_a", dim=2, param_dim=2, matrix=matrix,
        ep_distance=lambda p: abs(as_complex(p)),
        meta={"degeneracy_locus": "single exceptional point at z = 0"})


def _sym_b() -> MatrixFamily:
    # complex symmetric; eigenvalues ±sqrt(2 + 2 z^2)
    def matrix(p):
        z = as_complex(p)
        return np.array([[1.0 + z, 1.0 - z],
                         [1.0 - z, -(1.0 + z)]], dtype=complex)

    def distance(p):
        z = as_complex(p)
        return min(abs(z - 1j), abs(z + 1j))

    return MatrixFamily(
        name="sym_b", dim=2, param_dim=2, matrix=matrix,
        ep_distance=distance,
        meta={"degeneracy_locus": "exceptional points at z = ±i"})


def _nonsym_a() -> MatrixFamily:
    # upper triangular; eigenvalues ±z exchange around the origin
    def matrix(p):
        z = as_complex(p)
        return np.array([[z, 1.0], [0.0, -z]], dtype=complex)

    return MatrixFamily(
        name="nonsym_a", dim=2, param_dim=2, matrix=matrix,
        ep_distance=lambda p: abs(as_complex(p)),
        meta={"degeneracy_locus": "single exceptional point at z = 0"})


def _nonsym_b(alpha=1.0, beta=2.0) -> MatrixFamily:
    alpha = complex(alpha)
    beta = complex(beta)
    if beta == 0:
        raise InvalidParams("nonsym_b requires beta != 0")

    # eigenvalues ±beta z: single-valued, yet the loop phase is nontrivial
    def matrix(p, _a=alpha, _b=beta):
        z = as_complex(p)
        return np.array([[_a * z, 1.0],
                         [(_b * _b - _a * _a) * z * z, -_a * z]], dtype=complex)

    return MatrixFamily(
        name="nonsym_b", dim=2, param_dim=2, matrix=matrix,
        ep_distance=lambda p: abs(as_complex(p)),
        meta={"degeneracy_locus": "single exceptional point at z = 0",
              "alpha": alpha, "beta": beta})


def _three_param(gamma=2.0) -> MatrixFamily:
    gamma = float(gamma)
    if gamma == 0.0:
        raise InvalidParams("three_param requires gamma != 0")

    # decaying two-level system over (R1, R2, R3); degeneracies form the
    # circle R1^2 + R2^2 = (gamma/2)^2 in the R3 = 0 plane
    def matrix(p, _g=gamma):
        r1, r2, r3 = p
        d = r3 - 0.5j * _g
        return np.array([[d, r1 - 1j * r2],
                         [r1 + 1j * r2, -d]], dtype=complex)

    def distance(p, _g=gamma):
        r1, r2, r3 = p
        rho = np.hypot(r1, r2)
        return float(np.hypot(rho - 0.5 * abs(_g), r3))

    return MatrixFamily(
        name="three_param", dim=2, param_dim=3, matrix=matrix,
        ep_distance=distance,
        meta={"degeneracy_locus":
              "circle R1^2 + R2^2 = (gamma/2)^2 in the R3 = 0 plane",
              "gamma": gamma})


def _three_param_slice(gamma=2.0) -> MatrixFamily:
    gamma = float(gamma)
    if gamma == 0.0:
        raise InvalidParams("three_param_slice requires gamma != 0")

    # R2 = 0 slice of the three-parameter family: complex symmetric over
    # (R1, R3) with exceptional points at (±gamma/2, 0)
    def matrix(p, _g=gamma):
        r1, r3 = p
        d = r3 - 0.5j * _g
        return np.array([[d, r1], [r1, -d]], dtype=complex)

    def distance(p, _g=gamma):
        r1, r3 = p
        half = 0.5 * abs(_g)
        return float(min(np.hypot(r1 - half, r3), np.hypot(r1 + half, r3)))

    return MatrixFamily(
        name="three_param_slice", dim=2, param_dim=2, matrix=matrix,
        ep_distance=distance,
        meta={"degeneracy_locus": "exceptional points at (R1, R3) = (±gamma/2, 0)",
              "gamma": gamma})


def _hermitian_spin() -> MatrixFamily:
    # spin-1/2 in a magnetic field: R . sigma, degenerate only at R = 0
    def matrix(p):
        r1, r2, r3 = p
        return np.array([[r3, r1 - 1j * r2],
                         [r1 + 1j * r2, -r3]], dtype=complex)

    return MatrixFamily(
        name="hermitian_spin", dim=2, param_dim=3, matrix=matrix,
        hermitian=True,
        ep_distance=lambda p: float(np.linalg.norm(p)),
        meta={"degeneracy_locus": "diabolic point at the origin"})


BUILTIN_FAMILIES = {
    "sqrt_branch": _sqrt_branch,
    "block_three": _block_three,
    "sym_a": _sym_a,
    "sym_b": _sym_b,
    "nonsym_a": _nonsym_a,
    "nonsym_b": _nonsym_b,
    "three_param": _three_param,
    "three_param_slice": _three_param_slice,
    "hermitian_spin": _hermitian_spin,
}


def example_family(name: str, **params) -> MatrixFamily:
    """Construct a built-in family by registry name.

    Parameters are family specific: nonsym_b takes complex ``alpha`` and
    ``beta`` (default 1, 2); three_param and three_param_slice take a real
    nonzero ``gamma`` (default 2). Raises InvalidParams for unknown names
    or rejected parameters.
    """
    try:
        builder = BUILTIN_FAMILIES[name]
    except KeyError:
        known = ", ".join(sorted(BUILTIN_FAMILIES))
        raise InvalidParams(f"unknown family {name!r}; known: {known}") from None
    try:
        return builder(**params)
    except TypeError as exc:
        raise InvalidParams(f"bad parameters for family {name!r}: {exc}") from None


MAX_POLY_DEGREE = 16


def polynomial_family(entries, param_dim: int, *, name: str = "inline") -> MatrixFamily:
    """Family whose matrix entries are polynomials in the point coordinates.

    ``entries[i][j]`` is a list of monomial terms; each term is a pair
    (coefficient, exponents) with a complex coefficient and one nonnegative
    integer exponent per coordinate. Total degree per term is capped at
    MAX_POLY_DEGREE.
    """
    n = len(entries)
    if n == 0 or any(len(row) != n for row in entries):
        raise InvalidParams("entries must form a square matrix of term lists")
    table = []
    for i, row in enumerate(entries):
        trow = []
        for j, terms in enumerate(row):
            tlist = []
            for term in terms:
                coeff = complex(term[0])
                expo = tuple(int(e) for e in term[1])
                if len(expo) != param_dim or any(e < 0 for e in expo):
                    raise InvalidParams(
                        f"entry ({i}, {j}): exponents must be {param_dim} "
                        f"nonnegative integers, got {term[1]!r}")
                if sum(expo) > MAX_POLY_DEGREE:
                    raise InvalidParams(
                        f"entry ({i}, {j}): total degree {sum(expo)} exceeds "
                        f"{MAX_POLY_DEGREE}")
                tlist.append((coeff, expo))
            trow.append(tuple(tlist))
        table.append(tuple(trow))

    def matrix(p, _table=tuple(table), _n=n):
        H = np.zeros((_n, _n), dtype=complex)
        for i in range(_n):
            for j in range(_n):
                acc = 0.0 + 0.0j
                for coeff, expo in _table[i][j]:
                    mono = coeff
                    for x, e in zip(p, expo):
                        if e:
                            mono = mono * x ** e
                    acc += mono
                H[i, j] = acc
        return H

    return MatrixFamily(name=name, dim=n, param_dim=param_dim, matrix=matrix,
                        meta={"degeneracy_locus": "unknown (inline polynomial)"})
