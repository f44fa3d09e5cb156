"""Tests for the transition matrix, scattering ratios, and zero location."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trioscatter.jost import (
    gaussian_pair,
    jost_left,
    jost_right,
    zero_potential,
)
from trioscatter.numerics import graded_grid
from trioscatter.rootsys import SQRT3, ZETA, ZETA1, ZETA2
from trioscatter.scatter import (
    BoundStateSet,
    ScatteringCoeffs,
    TransitionMatrix,
    dual_unitarity_residual,
    locate_bound_states,
    ray_scattering_dual,
    ray_scattering_right,
    scattering_coefficients,
    t00_at,
    transition_matrix,
    unitarity_residual,
    wronskian,
)

# Full-matrix assembly marches rotated arguments on both half-axes, so a
# real spectral point must keep sqrt(3)*|lam| under the admission margin
# (0.95 of the decay rate): |lam| <= 0.548 for a = 1 fixtures.
LAM_REF = 0.45


@pytest.fixture(scope="module")
def pot():
    return gaussian_pair(0.25, 0.2, a=1.0, x_max=12.0, n=1201, q_shift=0.35)


@pytest.fixture(scope="module")
def pot_wide():
    return gaussian_pair(0.25, 0.2, a=1.0, x_max=14.0, n=1401, q_shift=0.35)


@pytest.fixture(scope="module")
def pot_b():
    return gaussian_pair(-0.18, 0.3, a=1.0, x_max=14.0, n=1401, q_shift=-0.6)


@pytest.fixture(scope="module")
def pot0():
    return zero_potential(a=1.0, x_max=12.0, n=1201)


@pytest.fixture(scope="module")
def tm_ref(pot_wide):
    return transition_matrix(
        LAM_REF, jost_left(LAM_REF, pot_wide), jost_right(LAM_REF, pot_wide)
    )


class TestWronskianHelper:
    def test_antisymmetric(self):
        f = (1.3 + 0.2j, -0.7j)
        g = (0.4 - 1.1j, 2.0 + 0.5j)
        assert wronskian(f, g) == -wronskian(g, f)

    def test_derivative_on_first_slot(self):
        # W((v, v'), (1, 0)) = v' for a constant second argument
        assert wronskian((2.0 + 1j, 3.0 - 4j), (1.0, 0.0)) == 3.0 - 4j


class TestZeroPotentialIdentity:
    @pytest.mark.parametrize("lam", [0.2, 0.33, 0.45, -0.4])
    def test_transition_is_identity(self, pot0, lam):
        tm = transition_matrix(
            lam, jost_left(lam, pot0), jost_right(lam, pot0)
        )
        assert np.max(np.abs(tm.t - np.eye(3))) < 1e-10

    def test_ratios_vanish(self, pot0):
        tm = transition_matrix(
            0.33, jost_left(0.33, pot0), jost_right(0.33, pot0)
        )
        r0, s1, s2, r0d, s1d, s2d = scattering_coefficients(tm)
        assert abs(r0 - 1) < 1e-10 and abs(r0d - 1) < 1e-10
        assert max(abs(s1), abs(s2), abs(s1d), abs(s2d)) < 1e-10


class TestTransitionMatrix:
    def test_frozen_entries(self, tm_ref):
        # Doubling the x grid moves these by ~5e-8, so the pins guard
        # regressions without pinning quadrature noise.
        assert tm_ref.t[0, 0] == pytest.approx(
            0.7257967470872261 + 1.5594938339142974j, rel=1e-6
        )
        assert tm_ref.t[0, 1] == pytest.approx(
            -0.4724292410221498 - 0.7271004149710611j, rel=1e-6
        )
        assert tm_ref.t[0, 2] == pytest.approx(
            0.6356758952877061 - 0.9438243847592431j, rel=1e-6
        )

    def test_det_is_unity_and_constant(self, pot_wide):
        dets = []
        for lam in (0.3, 0.38, 0.45):
            tm = transition_matrix(
                lam, jost_left(lam, pot_wide), jost_right(lam, pot_wide)
            )
            dets.append(tm.det_class)
        assert dets == [1.0 + 0j] * 3

    def test_rejects_complex_lambda(self, pot_wide):
        bl = jost_left(LAM_REF, pot_wide)
        br = jost_right(LAM_REF, pot_wide)
        with pytest.raises(ValueError, match="real lambda"):
            transition_matrix(0.3 + 0.2j, bl, br)

    def test_rejects_tiny_lambda(self, pot_wide):
        bl = jost_left(LAM_REF, pot_wide)
        br = jost_right(LAM_REF, pot_wide)
        with pytest.raises(ValueError, match="too small"):
            transition_matrix(1e-9, bl, br)

    def test_rejects_swapped_bundles(self, pot_wide):
        bl = jost_left(LAM_REF, pot_wide)
        br = jost_right(LAM_REF, pot_wide)
        with pytest.raises(ValueError, match="minus-side"):
            transition_matrix(LAM_REF, br, bl)

    def test_rejects_mismatched_lambda(self, pot_wide):
        bl = jost_left(0.38, pot_wide)
        br = jost_right(LAM_REF, pot_wide)
        with pytest.raises(ValueError, match="at the given lambda"):
            transition_matrix(LAM_REF, bl, br)

    def test_constructor_rejects_bad_det(self):
        with pytest.raises(ValueError, match="cube root"):
            TransitionMatrix(lam=0.3 + 0.2j, t=2.0 * np.eye(3))

    def test_constructor_rejects_broken_pairing_on_real_axis(self):
        # unimodular but does not satisfy the conjugation identity
        t = np.eye(3, dtype=complex)
        t[0, 1] = 0.5
        with pytest.raises(ValueError, match="conjugation-identity"):
            TransitionMatrix(lam=0.4, t=t)


class TestQuadraticIdentities:
    def test_unitarity(self, tm_ref):
        assert unitarity_residual(tm_ref) < 1e-6

    def test_dual_unitarity(self, tm_ref):
        assert dual_unitarity_residual(tm_ref) < 1e-6

    def test_conjugation_pairing(self, tm_ref):
        assert tm_ref.conjugation_residual() < 1e-6

    def test_second_potential(self, pot_b):
        tm = transition_matrix(
            0.38, jost_left(0.38, pot_b), jost_right(0.38, pot_b)
        )
        assert unitarity_residual(tm) < 1e-6
        assert dual_unitarity_residual(tm) < 1e-6

    def test_reciprocal_inverts(self, tm_ref):
        assert np.max(np.abs(tm_ref.t @ tm_ref.reciprocal() - np.eye(3))) < 1e-12

    def test_reciprocal_corner_conjugates(self, tm_ref):
        # exact identity for the self-adjoint class at real lambda; the
        # measured gap is pure quadrature (~8e-8 on this grid)
        td = tm_ref.reciprocal()
        assert abs(td[0, 0] - np.conj(tm_ref.t[0, 0])) < 1e-6


class TestRotationStructure:
    def test_diagonal_entries_are_rotated_corners(self, tm_ref, pot_wide):
        v1 = t00_at(LAM_REF * ZETA1, pot_wide)
        v2 = t00_at(LAM_REF * ZETA2, pot_wide)
        assert abs(tm_ref.t[1, 1] - v1) < 1e-12
        assert abs(tm_ref.t[2, 2] - v2) < 1e-12

    @pytest.mark.parametrize("lam", [0.3, 0.2 + 0.31j, -0.14 - 0.4j])
    def test_column_rotation(self, pot, lam):
        # rotating the spectral point by one sector shifts the column
        # index by one
        rot = jost_right(lam * ZETA1, pot)
        base = jost_right(lam, pot)
        for k in range(3):
            kk = (k + 1) % 3
            dev = np.max(np.abs(rot.val[k].values - base.val[kk].values))
            assert dev < 1e-8 * max(1.0, np.max(np.abs(base.val[kk].values)))


class TestColumnDeterminant:
    @pytest.mark.parametrize("lam", [0.45, -0.38])
    def test_constant_in_x_with_cubic_scale(self, pot, lam):
        b = jost_right(lam, pot)
        rows = np.stack([
            np.stack([c.values for c in b.val]),
            np.stack([c.values for c in b.d1]),
            np.stack([c.values for c in b.d2]),
        ])
        dets = np.linalg.det(rows.transpose(2, 0, 1))
        target = 3.0 * SQRT3 * lam**3
        assert np.max(np.abs(dets - target)) < 1e-7 * abs(target)
        # constancy alone, independent of the closed-form value
        assert np.std(dets) < 1e-8 * abs(np.mean(dets))


class TestScatteringRatios:
    def test_frozen_values(self, tm_ref):
        r0, s1, s2, r0d, s1d, s2d = scattering_coefficients(tm_ref)
        assert r0 == pytest.approx(
            0.2453008896040257 - 0.5270693569878947j, rel=1e-6
        )
        assert s1 == pytest.approx(
            -0.49911966128211666 + 0.07064459766396604j, rel=1e-6
        )
        assert s2 == pytest.approx(
            -0.3415290489706398 - 0.5665662465934101j, rel=1e-6
        )
        assert s1d == pytest.approx(
            -0.08103640127671835 + 0.4887599555990321j, rel=1e-6
        )

    def test_degenerate_corner_rejected(self):
        t = np.array(
            [[1e-13, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 1.0]],
            dtype=complex,
        )
        tm = TransitionMatrix(lam=0.3 + 0.2j, t=t)
        with pytest.raises(ValueError, match="t00 vanishes"):
            scattering_coefficients(tm)


@pytest.fixture(scope="module")
def sweep(pot):
    return ray_scattering_right(pot, graded_grid(12.0, 12, gamma=3.0))


class TestRaySweeps:
    def test_layout(self, sweep):
        out1 = sweep["zeta1_out"]
        out2 = sweep["zeta2_out"]
        assert np.all(np.isnan(out1.s2)) and np.all(np.isnan(out2.s1))
        assert np.all(np.isnan(out1.r0_dual))
        assert np.all(np.isfinite(out1.r0)) and np.all(np.isfinite(out1.s1))
        assert np.all(np.isfinite(out2.r0)) and np.all(np.isfinite(out2.s2))
        np.testing.assert_allclose(
            out1.lambda_grid, -1j * np.abs(out1.lambda_grid) * ZETA1
        )

    def test_frozen_mid_node(self, sweep):
        # tau ~ 2.382 on the 12-node graded grid
        assert sweep["zeta1_out"].s1[6] == pytest.approx(
            -0.0006513870623952937 - 0.0006481471424024752j, rel=1e-3
        )
        assert sweep["zeta1_out"].r0[6] == pytest.approx(
            0.9163596642833772 - 0.10827128376296587j, rel=1e-5
        )
        assert sweep["zeta2_out"].s2[6] == pytest.approx(
            -0.0008947315335645484 + 0.0015876389706705233j, rel=1e-3
        )

    def test_small_tau_limit(self, sweep):
        # the ratio tends to the sector constant as tau -> 0
        assert abs(sweep["zeta1_out"].s1[0] - ZETA1) < 0.05

    def test_corner_ratio_decays_to_unity(self, sweep):
        assert abs(sweep["zeta1_out"].r0[-1] - 1.0) < 0.1

    def test_dual_sweep(self, pot):
        tg = graded_grid(12.0, 12, gamma=3.0)
        dual = ray_scattering_dual(pot, tg)
        in1 = dual["zeta1_in"]
        assert np.all(np.isnan(in1.r0)) and np.all(np.isnan(in1.s1))
        assert np.all(np.isfinite(in1.r0_dual))
        np.testing.assert_allclose(in1.lambda_grid, 1j * tg.nodes * ZETA1)
        assert in1.s1_dual[6] == pytest.approx(
            -0.0004352398178507889 - 0.0008481982964627032j, rel=1e-3
        )


def _surrogate(mu1, nu1, denom=lambda z: z**4 + 81.0):
    return lambda z: (z - mu1 * ZETA1) ** 2 * (z - nu1 * ZETA2) ** 2 / denom(z)


class TestBoundStateLocator:
    def test_planted_pair_default_disk(self):
        bs = locate_bound_states(_surrogate(0.35, -0.28), a=1.0)
        assert bs.winding_verified and bs.flags == ()
        assert len(bs.mu) == 1 and abs(bs.mu[0] - 0.35) < 1e-6
        assert len(bs.nu) == 1 and abs(bs.nu[0] + 0.28) < 1e-6
        assert bs.multiplicities == (2, 2)

    def test_wider_radius_reaches_far_zeros(self):
        bs = locate_bound_states(_surrogate(1.1, -0.8), a=1.0, radius=2.0)
        assert bs.winding_verified and bs.flags == ()
        assert abs(bs.mu[0] - 1.1) < 1e-6 and abs(bs.nu[0] + 0.8) < 1e-6

    def test_default_disk_excludes_far_zeros(self):
        bs = locate_bound_states(_surrogate(1.1, -0.8), a=1.0)
        assert bs.count == 0 and bs.winding_verified

    def test_zero_free_function(self):
        bs = locate_bound_states(lambda z: np.exp(0.3 * z) + 0j, a=1.0)
        assert bs.count == 0 and bs.winding_verified and bs.flags == ()

    def test_pole_near_contour_is_flagged(self):
        # denominator vanishing on the search boundary corrupts the cell
        # windings; the locator must report rather than silently accept
        f = _surrogate(1.1, -0.8, denom=lambda z: z**2 + 4.0)
        bs = locate_bound_states(f, a=1.0, radius=2.0)
        assert not bs.winding_verified
        assert bs.flags != ()

    def test_points_and_count(self):
        bs = BoundStateSet(mu=(0.4,), nu=(-0.3,), multiplicities=(2, 2))
        assert bs.count == 2
        pts = bs.points()
        assert abs(pts[0] - 0.4 * ZETA1) < 1e-15
        assert abs(pts[1] + 0.3 * ZETA2) < 1e-15

    @given(
        mu1=st.floats(min_value=0.1, max_value=0.45),
        nu1=st.floats(min_value=-0.45, max_value=-0.1),
    )
    @settings(max_examples=10, deadline=None)
    def test_planted_pair_property(self, mu1, nu1):
        bs = locate_bound_states(_surrogate(mu1, nu1), a=1.0)
        assert bs.winding_verified
        assert len(bs.mu) == 1 and abs(bs.mu[0] - mu1) < 1e-6
        assert len(bs.nu) == 1 and abs(bs.nu[0] - nu1) < 1e-6
