import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trioscatter.rootsys import (
    ROOTS,
    SQRT3,
    ZETA,
    SectorLabel,
    classify_sector,
    omega_contains,
    ray_point,
    sp_all,
    sp_eval,
)

# High-precision references (40-digit arithmetic, tools/make_fixtures.py).
S0_AT_1 = 1.168058313375918525516257
S1_AT_1 = 1.041865355098909846301337
S2_AT_1 = 0.5083581599842168635426939
S0_AT_2M1J = 1.168879358705251758507949 - 1.891118910547075511896889j


def rng():
    return np.random.default_rng(20260822)


class TestRoots:
    def test_triple(self):
        z = ROOTS.as_array()
        np.testing.assert_allclose(z**3, np.ones(3), atol=1e-15)
        assert abs(z[0] - 1) == 0
        assert abs(z[1] * z[2] - 1) < 1e-15
        assert abs(z[1] + z[2] + 1) < 1e-15

    def test_power_table(self):
        for k in range(3):
            for p in range(6):
                assert abs(ROOTS.power(k, p) - ZETA[k] ** p) < 1e-14


class TestSpEval:
    def test_values_at_zero(self):
        assert sp_eval(0, 0) == pytest.approx(1.0)
        assert sp_eval(1, 0) == pytest.approx(0.0, abs=1e-15)
        assert sp_eval(2, 0) == pytest.approx(0.0, abs=1e-15)

    def test_frozen_reference_values(self):
        assert sp_eval(0, 1.0) == pytest.approx(S0_AT_1, rel=1e-14)
        assert sp_eval(1, 1.0) == pytest.approx(S1_AT_1, rel=1e-14)
        assert sp_eval(2, 1.0) == pytest.approx(S2_AT_1, rel=1e-14)
        assert sp_eval(0, 2 - 1j) == pytest.approx(S0_AT_2M1J, rel=1e-13)

    def test_bad_index(self):
        with pytest.raises(ValueError):
            sp_eval(3, 0.5)

    def test_vectorized(self):
        z = rng().standard_normal(17) + 1j * rng().standard_normal(17)
        v = sp_eval(1, z)
        assert v.shape == z.shape
        for i in range(17):
            assert v[i] == pytest.approx(sp_eval(1, z[i]), rel=1e-14)

    def test_cyclic_derivative_chain(self):
        # s0' = s2, s1' = s0, s2' = s1 via central differences.
        g = rng()
        z = 5 * (g.random(200) * 2 - 1) + 5j * (g.random(200) * 2 - 1)
        z = z[np.abs(z) <= 5]
        h = 5e-5
        for p, pd in ((0, 2), (1, 0), (2, 1)):
            fd = (sp_eval(p, z + h) - sp_eval(p, z - h)) / (2 * h)
            assert np.max(np.abs(fd - sp_eval(pd, z))) < 1e-7

    def test_cubic_identity(self):
        # The determinant identity among the three basis functions.  The
        # polynomial is evaluated in extended precision on the float64
        # outputs so the check measures the values, not the checker.
        import mpmath as mp

        g = rng()
        z = 5 * (g.random(40) * 2 - 1) + 5j * (g.random(40) * 2 - 1)
        z = z[np.abs(z) <= 5]
        with mp.workdps(40):
            for zz in z:
                s0, s1, s2 = (mp.mpc(complex(v)) for v in sp_all(complex(zz)))
                resid = s0**3 + s1**3 + s2**3 - 3 * s0 * s1 * s2 - 1
                assert abs(complex(resid)) < 1e-12

    def test_third_derivative_equation(self):
        # y''' = y, fourth-order 7-point stencil.
        g = rng()
        z = 4.5 * (g.random(60) * 2 - 1) + 4.5j * (g.random(60) * 2 - 1)
        z = z[np.abs(z) <= 5]
        h = 0.015
        c = np.array([1.0, -8.0, 13.0, 0.0, -13.0, 8.0, -1.0]) / 8.0
        for p in range(3):
            d3 = sum(
                ci * sp_eval(p, z + (i - 3) * h) for i, ci in enumerate(c)
            ) / h**3
            assert np.max(np.abs(d3 - sp_eval(p, z))) < 1e-6

    def test_exponential_bound(self):
        # |s_k(-i lam (x - t))| <= exp(|lam| (t - x)) for t >= x.
        g = rng()
        for _ in range(50):
            lam = g.standard_normal() + 1j * g.standard_normal()
            x, t = sorted(g.uniform(-5, 5, 2))
            arg = -1j * lam * (x - t)
            bound = math.exp(abs(lam) * (t - x))
            for p in range(3):
                assert abs(sp_eval(p, arg)) <= bound * (1 + 1e-12)

    @given(
        st.complex_numbers(
            max_magnitude=4.0, allow_nan=False, allow_infinity=False
        )
    )
    @settings(max_examples=60, deadline=None)
    def test_conjugation_symmetry(self, z):
        # Real coefficients: s_p(conj z) = conj(s_p(z)).
        for p in range(3):
            a = sp_eval(p, np.conj(z))
            b = np.conj(sp_eval(p, z))
            assert abs(a - b) <= 1e-12 * max(1.0, abs(b))

    def test_shared_eval_consistency(self):
        z = 1.3 - 0.7j
        for p, v in enumerate(sp_all(z)):
            assert v == pytest.approx(sp_eval(p, z), rel=1e-15)


class TestClassifySector:
    def test_origin_rejected(self):
        with pytest.raises(ValueError):
            classify_sector(0.0)

    def test_ray_labels(self):
        assert classify_sector(1j) is SectorLabel.RAY_L0
        assert classify_sector(-1j) is SectorLabel.RAY_LHAT0
        assert classify_sector(2j * ZETA[1]) is SectorLabel.RAY_L1
        assert classify_sector(2j * ZETA[2]) is SectorLabel.RAY_L2
        assert classify_sector(-3j * ZETA[1]) is SectorLabel.RAY_LHAT1
        assert classify_sector(-3j * ZETA[2]) is SectorLabel.RAY_LHAT2

    def test_wedge_below_both_diagonals(self):
        # sqrt(3) Im < Re and sqrt(3) Im < -Re picks the bottom sector.
        for lam in (-2.0j, 0.5 - 2.0j, -0.5 - 2.0j):
            assert SQRT3 * lam.imag < lam.real
            assert SQRT3 * lam.imag < -lam.real
            lab = classify_sector(lam)
            assert lab in (SectorLabel.OMEGA0, SectorLabel.RAY_LHAT0)

    def test_negation_flips_sector(self):
        lam = 0.4 - 1.9j
        assert classify_sector(lam) is SectorLabel.OMEGA0
        assert classify_sector(-lam) is SectorLabel.OMEGA0_MINUS

    def test_every_point_gets_one_label(self):
        g = rng()
        for _ in range(400):
            lam = g.standard_normal() + 1j * g.standard_normal()
            if lam == 0:
                continue
            assert classify_sector(lam) in SectorLabel

    def test_slice_owners(self):
        def at(deg):
            th = math.radians(deg)
            return classify_sector(complex(math.cos(th), math.sin(th)))

        assert at(60) is SectorLabel.OMEGA0_MINUS
        assert at(120) is SectorLabel.OMEGA0_MINUS
        assert at(180) is SectorLabel.OMEGA2_MINUS
        assert at(240) is SectorLabel.OMEGA0
        assert at(300) is SectorLabel.OMEGA0
        assert at(0) is SectorLabel.OMEGA2


class TestOmegaMembership:
    def test_sectors_overlap(self):
        # 240 degrees lies in both Omega_0 and Omega_2^-.
        th = math.radians(240)
        lam = complex(math.cos(th), math.sin(th))
        assert omega_contains(0, lam)
        assert omega_contains(2, lam, minus=True)

    def test_central_ray_included_edges_not(self):
        assert omega_contains(0, -1j)
        assert not omega_contains(0, ray_point(SectorLabel.RAY_L1, 1.0))
        assert omega_contains(0, ray_point(SectorLabel.RAY_L1, 1.0), closed=True)

    def test_minus_sector(self):
        assert omega_contains(0, 1j, minus=True)
        assert not omega_contains(0, -1j, minus=True)
        assert omega_contains(
            0, ray_point(SectorLabel.RAY_LHAT1, 2.0), minus=True, closed=True
        )

    def test_origin_never_member(self):
        assert not omega_contains(0, 0.0)
