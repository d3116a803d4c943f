"""Branch tracking, monodromy permutations, and covering lifts."""

import numpy as np
import pytest

from epholonomy import (
    AmbiguousMatching,
    InvalidParams,
    MatrixFamily,
    Monodromy,
    NearEP,
    OpenCurve,
    circle,
    concatenate,
    example_family,
    fourier_loop,
    lift_closed,
    monodromy_group,
    monodromy_of,
    polyline,
    polynomial_family,
    reversed_curve,
    track,
)

Z_ENTRY = [(1.0, (1, 0)), (1.0j, (0, 1))]  # z = x + iy as a polynomial entry
ONE = [(1.0, (0, 0))]


def cube_root_family():
    """Companion-type family with spectrum = the three cube roots of z."""
    entries = [
        [[], ONE, []],
        [[], [], ONE],
        [Z_ENTRY, [], []],
    ]
    return polynomial_family(entries, param_dim=2, name="cube_root")


class TestMonodromyType:
    def test_identity(self):
        m = Monodromy.from_sigma((0, 1, 2))
        assert m.is_identity
        assert m.periods == (1, 1, 1)
        assert m.order == 1
        assert m.cycle_notation() == "id"

    def test_transposition(self):
        m = Monodromy.from_sigma((1, 0))
        assert not m.is_identity
        assert m.cycle_structure == ((0, 1),)
        assert m.periods == (2, 2)
        assert m.order == 2
        assert m.cycle_notation() == "(1 2)"

    def test_fixed_point_plus_swap(self):
        m = Monodromy.from_sigma((0, 2, 1))
        assert m.cycle_notation() == "(2 3)"
        assert m.periods == (1, 2, 2)
        assert m.order == 2

    def test_three_cycle(self):
        m = Monodromy.from_sigma((1, 2, 0))
        assert m.periods == (3, 3, 3)
        assert m.order == 3
        assert m.cycle_notation() == "(1 2 3)"

    def test_rejects_non_permutation(self):
        with pytest.raises(InvalidParams):
            Monodromy.from_sigma((0, 0))


class TestTrack:
    def test_square_root_loop_swaps_labels(self):
        fam = example_family("sqrt_branch")
        path = track(fam, circle([0.0, 0.0], 1.0), 256)
        mono = monodromy_of(path)
        assert mono.sigma == (1, 0)
        assert mono.periods == (2, 2)

    def test_loop_enclosing_no_branch_point_is_trivial(self):
        fam = example_family("sqrt_branch")
        path = track(fam, circle([2.0, 0.0], 0.5), 64)
        assert monodromy_of(path).is_identity

    def test_three_level_family_swaps_square_root_pair(self):
        fam = example_family("block_three")
        path = track(fam, circle([0.0, 0.0], 2.0), 512)
        mono = monodromy_of(path)
        # labels sorted by value at z = 2: (-sqrt 2, +sqrt 2, 2)
        assert mono.sigma == (1, 0, 2)
        assert mono.periods == (2, 2, 1)
        assert mono.cycle_notation() == "(1 2)"

    def test_branch_eigenvalues_vary_smoothly(self):
        fam = example_family("sqrt_branch")
        path = track(fam, circle([0.0, 0.0], 1.0), 512)
        values = path.eigenvalues(0)
        steps = np.abs(np.diff(values))
        assert steps.max() < 0.05
        # the branch ends on the other sheet
        assert abs(values[-1] + values[0]) < 1e-12

    def test_open_curve_has_identity_sigma_and_no_monodromy(self):
        fam = example_family("sqrt_branch")
        seg = polyline([[1.0, 0.0], [2.0, 0.0]])
        path = track(fam, seg, 16)
        assert path.sigma == (0, 1)
        assert not path.closed
        with pytest.raises(OpenCurve):
            monodromy_of(path)

    def test_orientation_reversal_inverts_monodromy(self):
        fam = cube_root_family()
        loop = circle([0.0, 0.0], 1.0)
        sigma = monodromy_of(track(fam, loop, 512)).sigma
        back = monodromy_of(track(fam, reversed_curve(loop), 512)).sigma
        inverse = tuple(np.argsort(sigma))
        assert back == inverse
        assert sigma != back  # a 3-cycle is not an involution

    def test_concatenation_composes_monodromies(self):
        fam = cube_root_family()
        loop = circle([0.0, 0.0], 1.0)
        sigma = monodromy_of(track(fam, loop, 512)).sigma
        double = concatenate([loop, loop])
        sigma2 = monodromy_of(track(fam, double, 1024)).sigma
        assert sigma2 == tuple(sigma[j] for j in sigma)
        there_and_back = concatenate([loop, reversed_curve(loop)])
        assert monodromy_of(track(fam, there_and_back, 1024)).is_identity

    def test_monodromy_stable_under_refinement(self):
        fam = example_family("sqrt_branch")
        loop = circle([0.0, 0.0], 1.0)
        sigmas = {monodromy_of(track(fam, loop, n)).sigma
                  for n in (64, 128, 256, 512)}
        assert sigmas == {(1, 0)}

    def test_monodromy_is_homotopy_invariant(self):
        fam = example_family("sqrt_branch")
        rng = np.random.default_rng(7)
        for _ in range(5):
            cos_amps = 0.12 * rng.standard_normal(3)
            sin_amps = 0.12 * rng.standard_normal(3)
            loop = fourier_loop([0.0, 0.0], 1.0, cos_amps, sin_amps)
            assert monodromy_of(track(fam, loop, 256)).sigma == (1, 0)

    def test_near_degenerate_sample_is_refused(self):
        fam = example_family("sqrt_branch")
        through_origin = circle([0.5, 0.0], 0.5)
        with pytest.raises(NearEP) as err:
            track(fam, through_origin, 64)
        assert "t = 0.5" in str(err.value)

    def test_unresolvable_matching_exhausts_bisection(self):
        # eigenvalues +/- exp(i theta(x)) whose rotation per substep is
        # exactly 2pi/3 or 4pi/3 at every bisection depth (2^k mod 3
        # alternates), so no refinement level can certify a matching
        omega = (2.0 * np.pi / 3.0) * 2.0**23

        def mat(p):
            g = np.exp(1j * omega * p[0])
            return np.array([[g, 0.0], [0.0, -g]])

        fam = MatrixFamily(name="spinner", dim=2, param_dim=1, matrix=mat)
        seg = polyline([[0.0], [1.0]])
        with pytest.raises(AmbiguousMatching):
            track(fam, seg, 8)

    def test_refinement_depth_reported(self):
        from epholonomy import lift

        fam = example_family("sqrt_branch")
        # four windings in eight samples rotate the eigenvalue pair by 90
        # degrees per step: an exact assignment tie that needs one bisection
        path = track(fam, lift(circle([0.0, 0.0], 1.0), 4), 8)
        assert path.refinement_depth >= 1
        assert monodromy_of(path).is_identity  # tau^4
        smooth = track(fam, circle([2.0, 0.0], 0.1), 64)
        assert smooth.refinement_depth == 0

    def test_min_gap_diagnostic(self):
        fam = example_family("sqrt_branch")
        path = track(fam, circle([0.0, 0.0], 1.0), 128)
        # gap = 2 sqrt|z| = 2 on the unit circle
        assert path.min_gap == pytest.approx(2.0, rel=1e-12)


class TestLabelPaths:
    def test_branch_labels_follow_matchings(self):
        fam = example_family("sqrt_branch")
        path = track(fam, circle([0.0, 0.0], 1.0), 64)
        labels = path.branch_labels(0)
        assert labels[0] == 0
        assert labels[-1] == 1
        flips = np.sum(labels[1:] != labels[:-1])
        assert flips % 2 == 1  # odd number of sheet exchanges

    def test_label_out_of_range(self):
        fam = example_family("sqrt_branch")
        path = track(fam, circle([0.0, 0.0], 1.0), 16)
        with pytest.raises(InvalidParams):
            path.branch_labels(2)

    def test_branch_vectors_match_frames(self):
        fam = example_family("block_three")
        path = track(fam, circle([0.0, 0.0], 2.0), 32)
        psis, phis = path.branch_vectors(2)
        for k in range(len(psis)):
            H = fam(path.points[k])
            E = path.eigenvalues(2)[k]
            np.testing.assert_allclose(H @ psis[k], E * psis[k], atol=1e-10)
            np.testing.assert_allclose(np.vdot(phis[k], psis[k]), 1.0,
                                       atol=1e-10)

    def test_with_frames_validates_length(self):
        fam = example_family("sqrt_branch")
        path = track(fam, circle([0.0, 0.0], 1.0), 16)
        with pytest.raises(InvalidParams):
            path.with_frames(path.frames[:-1])


class TestLiftClosed:
    def test_transposition_doubles_curve(self):
        fam = example_family("sqrt_branch")
        loop = circle([0.0, 0.0], 1.0)
        mono = monodromy_of(track(fam, loop, 128))
        lifted = lift_closed(loop, 0, mono)
        assert lifted.traversals == 2
        assert lifted.base_period == pytest.approx(2.0 * loop.base_period)
        path = track(fam, lifted, 256)
        assert monodromy_of(path).is_identity
        values = path.eigenvalues(0)
        # halfway through, the branch sits on the opposite sheet
        assert abs(values[128] + values[0]) < 1e-9
        assert abs(values[-1] - values[0]) < 1e-12

    def test_identity_monodromy_returns_curve_unchanged(self):
        loop = circle([2.0, 0.0], 0.5)
        mono = Monodromy.from_sigma((0, 1))
        assert lift_closed(loop, 1, mono) is loop

    def test_three_cycle_triples_curve(self):
        fam = cube_root_family()
        loop = circle([0.0, 0.0], 1.0)
        mono = monodromy_of(track(fam, loop, 512))
        assert mono.periods == (3, 3, 3)
        lifted = lift_closed(loop, 1, mono)
        assert lifted.traversals == 3
        assert monodromy_of(track(fam, lifted, 1536)).is_identity

    def test_label_bounds_checked(self):
        mono = Monodromy.from_sigma((1, 0))
        with pytest.raises(InvalidParams):
            lift_closed(circle([0.0, 0.0], 1.0), 2, mono)


class TestMonodromyGroup:
    def test_square_root_family_generates_order_two(self):
        fam = example_family("sqrt_branch")
        perms, order = monodromy_group(fam, [circle([0.0, 0.0], 1.0)])
        assert order == 2
        assert perms == {(0, 1), (1, 0)}

    def test_three_level_family_acts_as_z2_on_the_pair(self):
        fam = example_family("block_three")
        loop = circle([0.4, 0.0], 0.5)  # encloses 0, avoids the crossing at 1
        perms, order = monodromy_group(fam, [loop], n_samples=768)
        assert order == 2
        # at the base point z = 0.9 the square-root pair sorts to labels 0, 2
        assert perms == {(0, 1, 2), (2, 1, 0)}

    def test_cube_root_family_generates_z3(self):
        fam = cube_root_family()
        perms, order = monodromy_group(fam, [circle([0.0, 0.0], 1.0)],
                                       n_samples=768)
        assert order == 3
        assert (1, 2, 0) in perms or (2, 0, 1) in perms

    def test_no_loops_gives_trivial_group(self):
        fam = example_family("sqrt_branch")
        perms, order = monodromy_group(fam, [])
        assert order == 1
        assert perms == {(0, 1)}

    def test_loops_must_share_base_point(self):
        fam = example_family("sqrt_branch")
        with pytest.raises(InvalidParams):
            monodromy_group(fam, [circle([0.0, 0.0], 1.0),
                                  circle([0.0, 0.0], 2.0)])

    def test_open_curve_rejected(self):
        fam = example_family("sqrt_branch")
        with pytest.raises(OpenCurve):
            monodromy_group(fam, [polyline([[1.0, 0.0], [2.0, 0.0]])])
