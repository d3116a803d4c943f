"""End-to-end acceptance checks for the holonomy toolkit.

Eleven numbered criteria cover the public contract: closed-form phase
agreement, the zero-phase control family, topological sign factors,
family (non-)dependence of the phase, monodromy extraction, the
two-exceptional-point family, the Hermitian reduction, gauge invariance,
multi-patch assembly with explicit transition scalars, curvature
cross-checks, and the adiabatic limit of direct time evolution.

Each test prints one verdict line ``criterion NN: PASS|FAIL - detail``
*before* asserting, so a run with ``-s`` (or any failure report) shows a
line per criterion. Expected values are either closed forms evaluated
independently or golden numbers frozen from oracle runs; tolerances are
part of the contract and must not be loosened.
"""

import time

import numpy as np

from epholonomy.analytic2x2 import (TwoLevelPoint, best_patch,
                                    closed_form_holonomy, closed_form_phase,
                                    continue_f, frame_closed_form,
                                    split_traceless, transition_closed_form)
from epholonomy.curves import circle, discretize, ellipse, fourier_loop, lift
from epholonomy.evolve import integrate, sweep
from epholonomy.families import example_family
from epholonomy.phase import (curvature, gauge_perturb, geometric_phase,
                              multipatch_phase, stokes_check)
from epholonomy.tracking import monodromy_of, track

from test_phase import chain_transitions, plus_label, split_loop, wrap_to_zero

PI = np.pi
MODULE_T0 = time.time()
UNIT_LOOP = circle([0.0, 0.0], 1.0)
XY_PLANE = ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])


def verdict(num, ok, detail):
    print(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num}: {detail}"


def principal_f(family, point):
    """Principal root of a^2 + bc at one parameter point."""
    _, a, b, c = split_traceless(family(np.asarray(point, dtype=float)))
    return complex(np.sqrt(complex(a * a + b * c)))


def branch_of(path, label, f0):
    """Closed-form branch sign ('+'/'-') matching a tracked start label."""
    e0 = path.frames[0].values[label]
    return "+" if abs(e0 - f0) < abs(e0 + f0) else "-"


class TestAcceptance:
    def test_criterion_01_closed_form_phases(self):
        cases = [(1.0, 2.0), (1.0 + 1.0j, 2.0), (3.0, 1.0 + 2.0j)]
        worst, slowest = 0.0, 0.0
        for alpha, beta in cases:
            t0 = time.time()
            fam = example_family("nonsym_b", alpha=alpha, beta=beta)
            path = track(fam, UNIT_LOOP, 2048)
            lab_p = plus_label(path, beta)
            for label, branch in ((lab_p, "+"), (1 - lab_p, "-")):
                got = geometric_phase(path, label).geometric
                want = closed_form_phase("nonsym_b", branch,
                                         alpha=alpha, beta=beta)
                worst = max(worst, abs(wrap_to_zero(got - want)))
            slowest = max(slowest, time.time() - t0)
        ok = worst < 1e-6 and slowest < 1.0
        verdict(1, ok, f"closed-form phases: worst |err| {worst:.2e} "
                       f"(tol 1e-6), slowest case {slowest:.2f}s (tol 1s)")

    def test_criterion_02_zero_phase_family(self):
        path = track(example_family("nonsym_a"), UNIT_LOOP, 2048,
                     anchor="first")
        lab_p = plus_label(path, 1.0)
        g_plus = geometric_phase(path, lab_p).geometric
        g_minus = geometric_phase(path, 1 - lab_p).geometric
        ok = (abs(g_plus) < 1e-8
              and abs(g_minus + 2.0 * PI) < 1e-9
              and abs(wrap_to_zero(g_minus)) < 1e-6)
        verdict(2, ok, f"zero-phase family: |gamma+| {abs(g_plus):.1e} "
                       f"(tol 1e-8), raw gamma- {np.real(g_minus):+.9f} "
                       f"(-2pi to 1e-9), |mod 2pi| "
                       f"{abs(wrap_to_zero(g_minus)):.1e} (tol 1e-6)")

    def test_criterion_03_topological_signs(self):
        # Golden signs frozen from two independent oracle routes:
        # discrete holonomy and the closed-form connection, both at 2^14
        # samples, agree on -1 for every branch of both symmetric families.
        golden = -1.0
        cases = [("sym_a", [0.0, 0.0], (0.5, 1.0, 2.0)),
                 ("sym_b", [0.0, 1.0], (0.5, 1.0, 1.5))]
        worst_route, worst_gold, worst_stab = 0.0, 0.0, 0.0
        for name, center, radii in cases:
            fam = example_family(name)
            base = lift(circle(center, radii[1]), 2)
            path = track(fam, base, 2 ** 14)
            f0 = principal_f(fam, discretize(base, 8)[1][0])
            for label in (0, 1):
                disc = geometric_phase(path, label).holonomy_factor
                cf = np.exp(1j * closed_form_holonomy(
                    fam, base, branch_of(path, label, f0), 2 ** 14,
                    f_start=f0))
                worst_route = max(worst_route, abs(disc - cf))
                worst_gold = max(worst_gold, abs(disc - golden))
            # stability: radius changes and a smooth loop perturbation
            # keeping the enclosed exceptional point
            loops = [lift(circle(center, r), 2) for r in radii]
            loops.append(lift(fourier_loop(center, radii[0],
                                           cos_amps=(0.07,),
                                           sin_amps=(0.0, 0.04)), 2))
            for loop in loops:
                lp = track(fam, loop, 2048)
                for label in (0, 1):
                    fac = geometric_phase(lp, label).holonomy_factor
                    worst_stab = max(worst_stab, abs(fac - golden))
        ok = worst_route < 1e-6 and worst_gold < 1e-6 and worst_stab < 1e-6
        verdict(3, ok, f"topological signs: golden -1 per branch; route "
                       f"split {worst_route:.1e}, |factor+1| {worst_gold:.1e}"
                       f", stability {worst_stab:.1e} (tol 1e-6)")

    def test_criterion_04_family_dependence(self):
        shapes = [UNIT_LOOP, ellipse([0.0, 0.0], (1.0, 0.7)),
                  fourier_loop([0.0, 0.0], 1.0, cos_amps=(0.1,),
                               sin_amps=(0.0, 0.05))]
        fam2 = example_family("nonsym_b", alpha=1.0, beta=2.0)
        gps, gms = [], []
        for shape in shapes:
            path = track(fam2, shape, 2048)
            lab_p = plus_label(path, 2.0)
            gps.append(wrap_to_zero(geometric_phase(path, lab_p).geometric))
            gms.append(wrap_to_zero(geometric_phase(path,
                                                    1 - lab_p).geometric))
        spread = max(abs(a - b) for vals in (gps, gms)
                     for a in vals for b in vals)
        fam3 = example_family("nonsym_b", alpha=1.0, beta=3.0)
        path3 = track(fam3, UNIT_LOOP, 2048)
        g3 = wrap_to_zero(geometric_phase(path3,
                                          plus_label(path3, 3.0)).geometric)
        delta = g3 - gps[0]
        ok = spread < 1e-6 and abs(abs(delta) - PI / 6.0) < 1e-6
        verdict(4, ok, f"family dependence: homotopy spread {spread:.1e} "
                       f"(tol 1e-6); |dgamma+| - pi/6 = "
                       f"{abs(abs(delta) - PI / 6.0):.1e} (tol 1e-6, "
                       f"dgamma+ = {np.real(delta):+.6f})")

    def test_criterion_05_monodromy(self):
        m1 = monodromy_of(track(example_family("sqrt_branch"),
                                UNIT_LOOP, 1024))
        m2 = monodromy_of(track(example_family("block_three"),
                                circle([0.0, 0.0], 2.0), 1024))
        ok = (m1.sigma == (1, 0) and m1.periods == (2, 2) and m1.order == 2
              and m2.sigma == (1, 0, 2)
              and sorted(m2.periods) == [1, 2, 2] and m2.order == 2)
        verdict(5, ok, f"monodromy: square-root loop sigma={m1.sigma} "
                       f"periods={m1.periods} order={m1.order}; "
                       f"block family sigma={m2.sigma} "
                       f"periods={m2.periods} order={m2.order} (exact)")

    def test_criterion_06_two_exceptional_points(self):
        fam = example_family("three_param_slice", gamma=2.0)
        worst_f, worst_fac = 0.0, 0.0
        swaps = True
        for cx in (1.0, -1.0):
            loop = circle([cx, 0.0], 0.5)  # radius = gamma / 4
            path = track(fam, loop, 2048)
            swaps = swaps and path.sigma == (1, 0)
            f0 = principal_f(fam, [cx + 0.5, 0.0])
            _, fs = continue_f(fam, loop, f0, 2048)
            worst_f = max(worst_f, abs(fs[-1] + fs[0]))
            lifted = track(fam, lift(loop, 2), 4096)
            for label in (0, 1):
                fac = geometric_phase(lifted, label).holonomy_factor
                sign = 1.0 if abs(fac - 1.0) < abs(fac + 1.0) else -1.0
                worst_fac = max(worst_fac, abs(fac - sign))
        ok = swaps and worst_f < 1e-8 and worst_fac < 1e-4
        verdict(6, ok, f"two-EP family: both loops swap; root flip "
                       f"|f(1)+f(0)| {worst_f:.1e} (tol 1e-8); double-loop "
                       f"factor off +-1 by {worst_fac:.1e} (tol 1e-4)")

    def test_criterion_07_hermitian_reduction(self):
        fam = example_family("hermitian_spin")

        def cap_flux(theta0, label, n_t=16, n_p=32):
            # Stokes surface integral of the curvature two-form over the
            # spherical cap bounded by the loop (Gauss-Legendre in the
            # polar angle, trapezoid in the periodic azimuth).
            xs, ws = np.polynomial.legendre.leggauss(n_t)
            total = 0.0j
            for x, w in zip(0.5 * theta0 * (xs + 1.0), 0.5 * theta0 * ws):
                st, ct = np.sin(x), np.cos(x)
                for ph in 2.0 * PI * np.arange(n_p) / n_p:
                    cp, sp = np.cos(ph), np.sin(ph)
                    pt = np.array([st * cp, st * sp, ct])
                    d_th = np.array([ct * cp, ct * sp, -st])
                    d_ph = np.array([-st * sp, st * cp, 0.0])
                    F = curvature(fam, pt, label).components
                    jac = np.outer(d_th, d_ph) - np.outer(d_ph, d_th)
                    total += w * (2.0 * PI / n_p) * 0.5 * np.sum(F * jac)
            return total

        worst_mod, worst_flux = 0.0, 0.0
        for theta0 in (PI / 6.0, PI / 3.0):
            loop = circle([0.0, 0.0, np.cos(theta0)], np.sin(theta0),
                          axes=XY_PLANE)
            path = track(fam, loop, 2048)
            for label in (0, 1):
                res = geometric_phase(path, label)
                worst_mod = max(worst_mod,
                                abs(abs(res.holonomy_factor) - 1.0))
                flux = cap_flux(theta0, label)
                worst_flux = max(worst_flux,
                                 abs(wrap_to_zero(res.geometric) - flux))
        ok = worst_mod < 1e-8 and worst_flux < 1e-4
        verdict(7, ok, f"Hermitian reduction: ||holonomy|-1| "
                       f"{worst_mod:.1e} (tol 1e-8); phase vs cap flux "
                       f"{worst_flux:.1e} (tol 1e-4)")

    def test_criterion_08_gauge_invariance(self):
        loops = [
            ("sqrt_branch", {}, lift(UNIT_LOOP, 2)),
            ("block_three", {}, lift(circle([0.0, 0.0], 2.0), 2)),
            ("sym_a", {}, lift(UNIT_LOOP, 2)),
            ("sym_b", {}, lift(circle([0.0, 1.0], 0.5), 2)),
            ("nonsym_a", {}, UNIT_LOOP),
            ("nonsym_b", dict(alpha=1.0, beta=2.0), UNIT_LOOP),
            ("three_param", dict(gamma=2.0),
             lift(circle([1.0, 0.0, 0.0], 0.5,
                         axes=([1.0, 0.0, 0.0], [0.0, 0.0, 1.0])), 2)),
            ("three_param_slice", dict(gamma=2.0),
             lift(circle([1.0, 0.0], 0.5), 2)),
            ("hermitian_spin", {},
             circle([0.0, 0.0, 0.5], np.sqrt(3.0) / 2.0, axes=XY_PLANE)),
        ]
        rng = np.random.default_rng(11)
        worst = 0.0
        for name, kwargs, loop in loops:
            fam = example_family(name, **kwargs)
            path = track(fam, loop, 512)
            refs = [geometric_phase(path, label).holonomy_factor
                    for label in range(fam.dim)]
            for _ in range(100):
                shape = (path.n_steps, path.dim)
                resc = np.exp(rng.normal(scale=0.4, size=shape)
                              + 1j * rng.uniform(-PI, PI, size=shape))
                pert = gauge_perturb(path, resc)
                for label in range(fam.dim):
                    rel = (abs(geometric_phase(pert, label).holonomy_factor
                               - refs[label]) / abs(refs[label]))
                    worst = max(worst, rel)
        ok = worst < 1e-9
        verdict(8, ok, f"gauge invariance: 100 random gauges x 9 family "
                       f"loops, worst relative drift {worst:.1e} (tol 1e-9)")

    def test_criterion_09_multipatch_assembly(self):
        rng = np.random.default_rng(7)
        # clause 1: segment splitting with computed transition scalars
        split_cases = [
            ("sqrt_branch", {}, lift(UNIT_LOOP, 2)),
            ("nonsym_b", dict(alpha=1.0, beta=2.0), UNIT_LOOP),
            ("sym_b", {}, lift(circle([0.0, 1.0], 0.5), 2)),
        ]
        worst_split = 0.0
        for name, kwargs, loop in split_cases:
            fam = example_family(name, **kwargs)
            n_whole = 3000
            for label in (0, 1):
                ref = geometric_phase(track(fam, loop, n_whole),
                                      label).holonomy_factor
                for pieces in (2, 3, 5):
                    segs = split_loop(fam, loop, pieces,
                                      n_whole // pieces, rng)
                    res = multipatch_phase(segs,
                                           chain_transitions(segs, label),
                                           label)
                    worst_split = max(worst_split,
                                      abs(res.holonomy_factor - ref)
                                      / abs(ref))

        # clause 2: a loop crossing both closed-form coordinate patches,
        # reassembled from fixed-patch sections joined by the explicit
        # transition scalars (not overlaps measured at the junctions)
        fam = example_family("sym_b")
        loop = lift(circle([0.0, 1.0], 0.5), 2)
        n = 4096
        path = track(fam, loop, n)
        _, pts = discretize(loop, n)
        f0 = principal_f(fam, pts[0])
        _, fs = continue_f(fam, loop, f0, n)
        abcs = []
        for k in range(n):
            _, a, b, c = split_traceless(fam(pts[k]))
            abcs.append((complex(a), complex(b), complex(c)))
        patches = [best_patch(a, fs[k]) for k, (a, _, _) in enumerate(abcs)]
        flips = sum(1 for k in range(n) if patches[k] != patches[(k + 1) % n])

        def frame(k, patch):
            a, b, c = abcs[k % n]
            return frame_closed_form(TwoLevelPoint(
                a=a, b=b, c=c, f=complex(fs[k % n]), patch=patch))

        worst_explicit = 0.0
        for label in (0, 1):
            branch = branch_of(path, label, f0)
            gamma = 0.0j
            for k in range(n):
                patch = patches[k]
                fr0, fr1 = frame(k, patch), frame(k + 1, patch)
                fwd = np.vdot(fr0.phi(branch), fr1.psi(branch))
                bwd = np.vdot(fr1.phi(branch), fr0.psi(branch))
                gamma += 0.5j * (np.log(fwd) - np.log(bwd))
                nxt = patches[(k + 1) % n]
                if nxt != patch:
                    a, b, c = abcs[(k + 1) % n]
                    scalar = transition_closed_form(TwoLevelPoint(
                        a=a, b=b, c=c, f=complex(fs[(k + 1) % n]),
                        patch=patch), branch)
                    sign = 1.0 if patch == "M1" else -1.0
                    gamma += sign * 1.0j * np.log(scalar)
            ref = geometric_phase(path, label).holonomy_factor
            worst_explicit = max(worst_explicit,
                                 abs(np.exp(1j * gamma) - ref))
        ok = worst_split < 1e-8 and flips >= 2 and worst_explicit < 1e-8
        verdict(9, ok, f"multi-patch assembly: split r in {{2,3,5}} worst "
                       f"rel {worst_split:.1e} (tol 1e-8); explicit patch "
                       f"transitions ({flips} crossings) worst "
                       f"{worst_explicit:.1e} (tol 1e-8)")

    def test_criterion_10_curvature_cross_checks(self):
        fam = example_family("nonsym_b", alpha=1.0, beta=2.0)
        rng = np.random.default_rng(42)
        worst = 0.0
        for _ in range(20):
            rad = rng.uniform(0.3, 2.0)
            ang = rng.uniform(0.0, 2.0 * PI)
            point = np.array([rad * np.cos(ang), rad * np.sin(ang)])
            for label in (0, 1):
                sos = curvature(fam, point, label,
                                method="SumOverStates").components[0, 1]
                ext = curvature(fam, point, label,
                                method="ExteriorDerivative").components[0, 1]
                worst = max(worst, abs(sos - ext))
        spin = example_family("hermitian_spin")
        residual = max(
            max(stokes_check(fam, circle([0.9, 0.4], 0.05), label)
                for label in (0, 1)),
            max(stokes_check(spin, circle([0.0, 0.0, 1.0], 0.3,
                                          axes=XY_PLANE), label)
                for label in (0, 1)),
            max(stokes_check(example_family("three_param_slice", gamma=2.0),
                             circle([0.5, 0.8], 0.1), label)
                for label in (0, 1)))
        ok = worst < 1e-6 and residual < 1e-4
        verdict(10, ok, f"curvature cross-checks: 20-point method "
                        f"disagreement {worst:.1e} (tol 1e-6); worst "
                        f"small-loop Stokes residual {residual:.1e} "
                        f"(tol 1e-4)")

    def test_criterion_11_adiabatic_limit(self):
        fam = example_family("nonsym_b", alpha=1.0, beta=2.0)
        loop = circle([1.0, 0.0], 1e-3)
        label = plus_label(track(fam, loop, 8), 2.0)
        rows = sweep(fam, loop, label, [1e2, 1e3, 1e4], rel_tol=1e-10)
        errs = [row.error for row in rows]
        statuses = [row.status for row in rows]
        decreasing = errs[1] < errs[0] and errs[2] < errs[1]

        swap_fam = example_family("sqrt_branch")
        sq_path = track(swap_fam, UNIT_LOOP, 512)
        psi0 = sq_path.frames[0].right[:, 1]
        stay = integrate(swap_fam, UNIT_LOOP, 1e3, psi0, label=1)
        swap = integrate(swap_fam, UNIT_LOOP, 1e3, psi0, label=0)

        elapsed = time.time() - MODULE_T0
        ok = (decreasing and errs[2] < 1e-2
              and all(s == "ok" for s in statuses)
              and stay.fidelity < 0.5 and swap.fidelity > 0.9
              and elapsed < 300.0)
        verdict(11, ok, f"adiabatic limit: errors {errs[0]:.1e} > "
                        f"{errs[1]:.1e} > {errs[2]:.1e} (last < 1e-2); "
                        f"branch swap fidelities start {stay.fidelity:.3f} "
                        f"< 0.5, swapped {swap.fidelity:.3f} > 0.9; "
                        f"acceptance module {elapsed:.0f}s < 300s")
