import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trioscatter.numerics import (
    ComplexSamples,
    RealGrid,
    cauchy_row,
    fit_inverse_powers,
    graded_grid,
    gregory_grid,
    integrate_samples,
    pv_integrate,
    pv_row,
    uniform_grid,
)


class TestRealGrid:
    def test_validation(self):
        with pytest.raises(ValueError):
            RealGrid(np.array([0.0, 1.0, 0.5]), np.ones(3))
        with pytest.raises(ValueError):
            RealGrid(np.array([0.0, 1.0]), np.array([1.0, -1.0]))
        with pytest.raises(ValueError):
            RealGrid(np.array([1.0]), np.array([1.0]))

    def test_constant_integrates_interval(self):
        for g in (
            uniform_grid(0.0, 1.0, 31),
            gregory_grid(-2.0, 3.0, 40),
            graded_grid(7.0, 50),
        ):
            length = g.nodes[-1] - g.nodes[0]
            total = integrate_samples(
                ComplexSamples(g, np.ones_like(g.nodes, dtype=complex))
            )
            assert total == pytest.approx(length, rel=1e-12)

    def test_spacing(self):
        assert uniform_grid(0, 1, 11).spacing() == pytest.approx(0.1)
        with pytest.raises(ValueError):
            graded_grid(1.0, 20).spacing()


class TestIntegrateSamples:
    def test_zero(self):
        g = uniform_grid(0, 1, 9)
        assert integrate_samples(ComplexSamples(g, np.zeros(9))) == 0

    def test_exponential_on_graded_grid(self):
        g = graded_grid(40.0, 40000)
        val = integrate_samples(ComplexSamples(g, np.exp(-g.nodes)))
        # missing sliver (0, t_1) is ~ t_max/n**3
        assert abs(val - 1.0) < 1e-8

    def test_doubling_improves_by_rule_order(self):
        def err(grid):
            v = integrate_samples(ComplexSamples(grid, np.cos(grid.nodes)))
            return abs(v - np.sin(2.0))

        e1, e2 = err(uniform_grid(0, 2, 51)), err(uniform_grid(0, 2, 101))
        assert e1 / e2 >= 2.0  # trapezoid: expect ~4
        e1, e2 = err(gregory_grid(0, 2, 51)), err(gregory_grid(0, 2, 101))
        assert e1 / e2 >= 4.0  # fourth order: expect ~16

    def test_gregory_accuracy(self):
        g = gregory_grid(0.0, 28.0, 1401)
        val = integrate_samples(ComplexSamples(g, np.exp(-g.nodes)))
        assert abs(val - (1 - np.exp(-28.0))) < 1e-8


class TestPvIntegrate:
    def test_symmetric_log_cancels(self):
        g = graded_grid(2.0, 640)
        val = pv_integrate(ComplexSamples(g, np.ones(g.n)), 1.0)
        assert abs(val) < 1e-8

    def test_log_term(self):
        g = graded_grid(4.0, 800)
        val = pv_integrate(ComplexSamples(g, np.ones(g.n)), 1.0)
        assert val == pytest.approx(np.log(3.0), abs=1e-8)

    def test_linear_integrand(self):
        g = graded_grid(2.0, 640)
        val = pv_integrate(ComplexSamples(g, g.nodes.astype(complex)), 1.0)
        assert val == pytest.approx(2.0, abs=1e-7)

    def test_pole_on_node(self):
        g = uniform_grid(0.25, 2.25, 20001)
        assert 1.0 in g.nodes
        f = np.exp(-g.nodes)
        got = pv_integrate(ComplexSamples(g, f), 1.0)
        ref = _adaptive_pv(lambda s: np.exp(-s), 0.25, 2.25, 1.0)
        assert got == pytest.approx(ref, abs=1e-8)

    def test_rational_integrand_vs_excision(self):
        g = uniform_grid(0.5, 3.5, 30001)
        fun = lambda s: 1.0 / (1.0 + s**2)
        got = pv_integrate(ComplexSamples(g, fun(g.nodes)), 1.7)
        ref = _excision_pv(fun, 0.5, 3.5, 1.7)
        ref2 = _adaptive_pv(fun, 0.5, 3.5, 1.7)
        assert abs(ref - ref2) < 1e-7  # two independent oracles agree
        assert got == pytest.approx(ref2, abs=1e-8)

    def test_pole_rejection(self):
        g = uniform_grid(0.0, 2.0, 21)
        s = ComplexSamples(g, np.ones(21))
        with pytest.raises(ValueError):
            pv_integrate(s, 2.5)
        with pytest.raises(ValueError):
            pv_integrate(s, 0.02)  # within half a cell of the lower end

    @given(st.floats(min_value=0.6, max_value=1.4))
    @settings(max_examples=25, deadline=None)
    def test_antisymmetry(self, t):
        g = uniform_grid(0.1, 2.1, 401)
        f = np.sin(g.nodes) + 0.3j * g.nodes
        a = pv_integrate(ComplexSamples(g, f), t)
        b = pv_integrate(ComplexSamples(g, -f), t)
        assert abs(a + b) < 1e-12 * max(1.0, abs(a))


def _excision_pv(fun, a, b, t, eps=1e-7):
    from scipy.integrate import quad

    left = quad(lambda s: fun(s) / (s - t), a, t - eps, limit=400)[0]
    right = quad(lambda s: fun(s) / (s - t), t + eps, b, limit=400)[0]
    return left + right


def _adaptive_pv(fun, a, b, t):
    # Independent subtraction-form oracle on adaptive quadrature.
    from scipy.integrate import quad

    ft = fun(t)
    sm = quad(
        lambda s: fun(s) - ft if s == t else (fun(s) - ft) / (s - t),
        a, b, points=[t], limit=400,
    )[0]
    return sm + ft * np.log((b - t) / (t - a))


def _adaptive_cauchy(fun, fprime, a, b, c):
    # Value- and slope-subtracted adaptive oracle: the remaining
    # integrand is smooth uniformly in Im c.
    from scipy.integrate import quad

    t0 = min(max(c.real, a), b)
    f0, f1 = fun(t0), fprime(t0)
    pts = [t0] if a < t0 < b else None

    def smooth(s):
        return (fun(s) - f0 - f1 * (s - t0)) / (s - c)

    re = quad(lambda s: smooth(s).real, a, b, points=pts, limit=400)[0]
    im = quad(lambda s: smooth(s).imag, a, b, points=pts, limit=400)[0]
    clog = np.log((b - c) / (a - c))
    return re + 1j * im + f0 * clog + f1 * ((b - a) + (c - t0) * clog)


class TestCauchyRow:
    def test_far_pole_plain_rule(self):
        g = uniform_grid(0.0, 2.0, 8001)
        c = 1.0 + 2.0j
        f = np.exp(-g.nodes)
        got = np.dot(cauchy_row(g, c), f)
        ref = _adaptive_cauchy(
            lambda s: np.exp(-s), lambda s: -np.exp(-s), 0, 2, c
        )
        assert got == pytest.approx(ref, abs=1e-8)

    def test_near_axis_pole_stays_accurate(self):
        g = uniform_grid(0.0, 2.0, 801)
        fun = lambda s: np.exp(-s)
        fp = lambda s: -np.exp(-s)
        f = fun(g.nodes)
        for c in (0.9 + 1e-5j, 0.9 - 1e-5j, 0.9004 + 1e-7j):
            got = np.dot(cauchy_row(g, c), f)
            assert got == pytest.approx(
                _adaptive_cauchy(fun, fp, 0.0, 2.0, c), abs=2e-6
            )

    def test_sokhotski_limit(self):
        # Boundary values from above/below differ by the full residue
        # 2*pi*i*f(t); each side is PV +/- half of it.
        g = uniform_grid(0.1, 2.1, 1001)
        f = np.cos(g.nodes).astype(complex)
        t = 1.1
        up = np.dot(cauchy_row(g, t + 1e-9j), f)
        dn = np.dot(cauchy_row(g, t - 1e-9j), f)
        pv = np.dot(pv_row(g, t), f)
        assert up == pytest.approx(pv + 1j * np.pi * np.cos(t), abs=1e-6)
        assert dn == pytest.approx(pv - 1j * np.pi * np.cos(t), abs=1e-6)

    def test_exact_axis_pole_gives_upper_branch(self):
        g = uniform_grid(0.1, 2.1, 1001)
        f = np.cos(g.nodes).astype(complex)
        t = 1.1
        on = np.dot(cauchy_row(g, complex(t, 0.0)), f)
        pv = np.dot(pv_row(g, t), f)
        assert on == pytest.approx(pv + 1j * np.pi * np.cos(t), abs=1e-6)


class TestFitInversePowers:
    def test_constant_one(self):
        pts = [(10.0 * 2**j, 1.0 + 0j) for j in range(6)]
        c1, c2 = fit_inverse_powers(pts)
        assert abs(c1) < 1e-12 and abs(c2) < 1e-12

    def test_exact_single_pole(self):
        pts = [(10.0 * 2**j + 0j, 1 + 3.0 / (10.0 * 2**j)) for j in range(6)]
        c1, c2 = fit_inverse_powers(pts)
        assert c1 == pytest.approx(3.0, rel=1e-10)
        assert abs(c2) < 1e-9

    def test_planted_two_term_model(self):
        lam = [10.0 * 2**j for j in range(6)]
        pts = [(x, 1 - 2j / (3 * x) + 5.0 / (-3 * x**2)) for x in lam]
        c1, c2 = fit_inverse_powers(pts)
        assert c1 == pytest.approx(-2j / 3, rel=1e-10)
        assert c2 == pytest.approx(-5.0 / 3, rel=1e-10)
        model = [1 + c1 / x + c2 / x**2 for x in lam]
        resid = max(abs(m - f) for m, (_, f) in zip(model, pts))
        assert resid < 1e-10

    def test_complex_ray_abscissae(self):
        lam = [(4.0 + 3.0 * j) * 1j for j in range(8)]
        pts = [(x, 1 + (2 - 1j) / x + 0.7j / x**2) for x in lam]
        c1, c2 = fit_inverse_powers(pts)
        assert c1 == pytest.approx(2 - 1j, rel=1e-9)
        assert c2 == pytest.approx(0.7j, rel=1e-9)

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            fit_inverse_powers([(10.0, 1.0), (20.0, 1.0), (40.0, 1.0)])

    def test_collinear_rejected(self):
        pts = [(10.0, 1.0)] * 6
        with pytest.raises(ValueError):
            fit_inverse_powers(pts)
