"""Curvature two-forms, checked two ways, and loop phases via Stokes.

The curvature of a spectral branch can be computed from matrix
derivatives and the spectral decomposition (a sum over states) or by
differentiating the connection itself (phase of a tiny plaquette).
Both must agree. Integrating the curvature over a surface must then
reproduce the phase of the boundary loop - Stokes' theorem, with the
spin-1/2 magnetic monopole as the star witness.
"""

import numpy as np

from epholonomy.curves import circle
from epholonomy.families import example_family
from epholonomy.phase import curvature, geometric_phase, stokes_check
from epholonomy.tracking import track

PI = np.pi
XY = ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])


def wrap(v):
    return v - 2.0 * PI * np.round(np.real(v) / (2.0 * PI))


def cap_flux(family, theta0, label, n_t=16, n_p=32):
    """Curvature flux through the spherical cap of opening angle theta0."""
    xs, ws = np.polynomial.legendre.leggauss(n_t)
    total = 0.0j
    for x, w in zip(0.5 * theta0 * (xs + 1.0), 0.5 * theta0 * ws):
        st, ct = np.sin(x), np.cos(x)
        for ph in 2.0 * PI * np.arange(n_p) / n_p:
            cp, sp = np.cos(ph), np.sin(ph)
            pt = np.array([st * cp, st * sp, ct])
            d_th = np.array([ct * cp, ct * sp, -st])
            d_ph = np.array([-st * sp, st * cp, 0.0])
            F = curvature(family, pt, label).components
            jac = np.outer(d_th, d_ph) - np.outer(d_ph, d_th)
            total += w * (2.0 * PI / n_p) * 0.5 * np.sum(F * jac)
    return total


def main():
    print("=" * 72)
    print("1. Two curvature computations, one answer")
    print("=" * 72)
    fam = example_family("hermitian_spin")
    print("  Spin-1/2 in a field: the lower band's curvature is the field")
    print("  of a monopole of charge -1/2 at the origin. At a few points:\n")
    rng = np.random.default_rng(3)
    print("    point                      F_12 (sum/states)  F_12 (plaquette)"
          "   |diff|")
    for _ in range(4):
        v = rng.normal(size=3)
        v = v / np.linalg.norm(v) * rng.uniform(0.8, 1.4)
        sos = curvature(fam, v, 0, method="SumOverStates").components[0, 1]
        ext = curvature(fam, v, 0,
                        method="ExteriorDerivative").components[0, 1]
        print(f"    [{v[0]:+.3f} {v[1]:+.3f} {v[2]:+.3f}]   "
              f"{sos:+.10f}  {ext:+.10f}  {abs(sos - ext):.1e}")
    print("\n  The same check passes on non-Hermitian families, where the")
    print("  curvature is complex. For the family with eigenvalues +-2z it")
    print("  vanishes identically away from z = 0 - which is exactly why")
    print("  demo 02 found loop phases that depend only on the winding:\n")
    fam_b = example_family("nonsym_b", alpha=1.0, beta=2.0)
    for p in ([0.9, 0.4], [-0.5, 1.1]):
        sos = curvature(fam_b, p, 0, method="SumOverStates").components[0, 1]
        ext = curvature(fam_b, p, 0,
                        method="ExteriorDerivative").components[0, 1]
        print(f"    at {p}: F_12 = {sos:.2e} (sum/states), "
              f"{ext:.2e} (plaquette)")

    print()
    print("=" * 72)
    print("2. Small-loop Stokes residuals")
    print("=" * 72)
    print("  |loop phase - integrated curvature| over small disks:\n")
    checks = [
        ("spin-1/2, disk near the north pole",
         fam, circle([0.0, 0.0, 1.0], 0.3, axes=XY)),
        ("non-symmetric 2x2, disk at (0.9, 0.4)",
         fam_b, circle([0.9, 0.4], 0.05)),
        ("two-EP slice, disk at (0.5, 0.8)",
         example_family("three_param_slice", gamma=2.0),
         circle([0.5, 0.8], 0.1)),
    ]
    for title, family, loop in checks:
        res = max(stokes_check(family, loop, label)
                  for label in range(family.dim))
        print(f"    {title:<42} residual = {res:.1e}")

    print()
    print("=" * 72)
    print("3. The monopole, globally: cone loops and cap fluxes")
    print("=" * 72)
    print("  Drive the spin around a cone of opening angle theta0. The loop")
    print("  phase must equal the curvature flux through the spherical cap")
    print("  it bounds - here, for the lower band, plus half the enclosed")
    print("  solid angle (the sign flips with band and orientation):\n")
    print("    theta0      loop phase      cap flux        |diff|     "
          "(solid angle)/2")
    for theta0 in (PI / 6.0, PI / 4.0, PI / 3.0):
        loop = circle([0.0, 0.0, np.cos(theta0)], np.sin(theta0), axes=XY)
        path = track(fam, loop, 2048)
        label = int(np.argmin(path.frames[0].values.real))
        g = np.real(wrap(geometric_phase(path, label).geometric))
        fl = np.real(cap_flux(fam, theta0, label))
        half_sa = PI * (1.0 - np.cos(theta0))
        print(f"    {theta0:.4f}   {g:+.8f}   {fl:+.8f}   "
              f"{abs(g - fl):.1e}   {half_sa:+.8f}")
    print("\n  The third column is computed purely from local curvature")
    print("  samples, the second purely from eigenvector transport around")
    print("  the rim; they agree to quadrature accuracy. Both reproduce the")
    print("  textbook half-solid-angle, which this library never assumes.")


if __name__ == "__main__":
    main()
