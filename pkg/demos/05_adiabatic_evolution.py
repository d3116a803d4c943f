"""Direct time evolution vs eigenvector transport: the adiabatic story.

Solving i dpsi/dt = H(t/T) psi around a parameter loop and peeling off
the dynamical factor should reproduce the geometric phase as T grows -
*when* an adiabatic regime exists. Non-Hermitian loops add two twists:
the dynamical factor can overflow double precision (handled here in log
space), and loops around an exceptional point flip which branch
dominates mid-course, so a single traversal ends on the OTHER branch.
"""

import numpy as np

from epholonomy.curves import circle
from epholonomy.evolve import integrate, sweep
from epholonomy.families import example_family
from epholonomy.tracking import track

PI = np.pi


def main():
    print("=" * 72)
    print("1. A clean adiabatic limit (no exceptional point enclosed)")
    print("=" * 72)
    fam = example_family("nonsym_b", alpha=1.0, beta=2.0)
    loop = circle([1.0, 0.0], 1e-3)
    print("  Family eigenvalues +-2z, tiny loop around z = 1; comparing the")
    print("  phase extracted from evolution with the tracked geometric")
    print("  phase at increasing ramp times T:\n")
    print("    T          |phase error|   branch fidelity   status")
    for row in sweep(fam, loop, 1, [1e2, 1e3, 1e4], rel_tol=1e-10):
        print(f"    {row.T:<9.0f}  {row.error:.2e}       "
              f"{row.fidelity:.12f}   {row.status}")
    print("\n  The error falls with T and the state hugs its branch: the")
    print("  classic adiabatic picture, non-Hermitian or not.\n")

    print("=" * 72)
    print("2. Dynamical factors too large for float64")
    print("=" * 72)
    sq = example_family("sqrt_branch")
    unit = circle([0.0, 0.0], 1.0)
    path = track(sq, unit, 512)
    psi0 = path.frames[0].right[:, 1]
    ref = (path.ts, path.eigenvalues(1))
    res = integrate(sq, unit, 1e3, psi0, label=0, shift=ref)
    print("  On the square-root family's unit loop at T = 1000 the")
    print("  amplified branch outgrows the other by exp(2T/pi) ~ 10^276,")
    print("  and a doubled loop would overflow float64 outright. Evolving")
    print("  in a co-rotating frame removes the growth from the state; the")
    print("  removed factor is never materialized, only its exponent:")
    print(f"    log-scale exponent = {res.log_scale:.4f}")
    print(f"    2 T / pi           = {2e3 / PI:.4f}  (the closed-form "
          "growth rate)\n")

    print("=" * 72)
    print("3. Single traversal around an exceptional point: branch swap")
    print("=" * 72)
    print("  Start on one branch of +-sqrt(z) and go once around z = 0 at")
    print("  T = 1000. The eigenvalue branches exchange along the way, and")
    print("  the evolved state follows suit:\n")
    stay = integrate(sq, unit, 1e3, psi0, label=1, shift=ref)
    swap = integrate(sq, unit, 1e3, psi0, label=0, shift=ref)
    print(f"    fidelity to the starting label : {stay.fidelity:.6f}")
    print(f"    fidelity to the swapped label  : {swap.fidelity:.6f}")
    print("\n  The monodromy is physical: adiabatic transport around the")
    print("  exceptional point lands on the other branch.\n")

    print("=" * 72)
    print("4. When no adiabatic window exists")
    print("=" * 72)
    print("  On a loop around the +-2z family's exceptional point, the")
    print("  imaginary gap Im(E+ - E-) changes sign mid-loop. Whichever")
    print("  branch is followed, the other is amplified during half the")
    print("  traversal, stimulating transitions that no slowdown removes:\n")
    print("    T        |phase error|   branch fidelity   status")
    for row in sweep(fam, circle([0.0, 0.0], 0.25), 1, [30.0, 120.0, 480.0],
                     rel_tol=1e-8):
        err = "---     " if np.isnan(row.error) else f"{row.error:.2e}"
        print(f"    {row.T:<7.0f}  {err}       "
              f"{row.fidelity:.6f}         {row.status}")
    print("\n  Fidelities saturate away from 1 and the extracted phase does")
    print("  not converge: increasing T amplifies the contamination as fast")
    print("  as it suppresses ordinary non-adiabatic leakage. Geometric")
    print("  data for such loops comes from eigenvector transport (demos")
    print("  01-03), not from slow driving.")


if __name__ == "__main__":
    main()
