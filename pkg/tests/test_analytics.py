import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mlnet import analytics
from mlnet.analytics import (
    AnalyticCurve, DomainError, alpha_for, csrd, csrd_closed_form, csrd_fast, csrd_quadrature,
    density, normalization_constant,
)

TABLE_ALPHAS = [0, 1, 1.25, 2, 2.5, 3, 4, 5, 7, 8, 13]

# C_alpha from 30-digit mpmath quadrature of the unnormalised density on [0, 1, inf)
MPMATH_C = {
    0: 0.82699334313268807427,
    1: 3.375,
    1.25: 4.6030513725488789198,
    2: 11.164410132291289003,
    2.5: 19.660416045722947703,
    3: 34.171875,
    4: 100.47969119062160102,
    5: 288.3251953125,
    7: 2270.5609130859375,
    8: 6278.5452752539840411,
    13: 936163.6837902367115,
}


def mp_normalization(alpha):
    mp.mp.dps = 30
    a = mp.mpf(alpha)
    f = lambda r: (r + r * r) ** a / (1 + r + r * r) ** (1 + 3 * a / 2)
    return float(1 / mp.quad(f, [0, 1, mp.inf]))


class TestNormalization:
    def test_alpha_one_is_27_over_8(self):
        assert mp_normalization(1) == pytest.approx(27 / 8, abs=1e-12)
        assert normalization_constant(1) == pytest.approx(27 / 8, abs=1e-10)

    def test_alpha_zero_closed_value(self):
        expected = 3 * math.sqrt(3) / (2 * math.pi)
        assert mp_normalization(0) == pytest.approx(expected, abs=1e-14)
        assert normalization_constant(0) == pytest.approx(expected, abs=1e-10)

    def test_alpha_two_against_riemann_sum(self):
        # midpoint sum on [0, 1] plus the tail [1, inf) mapped by r -> 1/r, where
        # P(r) dr = P(1/u) du / u^2 = (unnormalised) same form; so total = 2 * int_0^1
        u = (np.arange(2_000_000) + 0.5) / 2_000_000
        f = (u + u * u) ** 2 / (1 + u + u * u) ** 4
        integral = 2 * f.mean()
        assert normalization_constant(2) == pytest.approx(1 / integral, rel=1e-10)

    @pytest.mark.parametrize("alpha", TABLE_ALPHAS)
    def test_matches_mpmath(self, alpha):
        assert normalization_constant(alpha) == pytest.approx(MPMATH_C[alpha], rel=1e-10)

    @pytest.mark.parametrize("alpha", TABLE_ALPHAS)
    def test_density_integrates_to_one(self, alpha):
        mp.mp.dps = 20
        c = normalization_constant(alpha)
        a = mp.mpf(alpha)
        total = mp.quad(lambda r: c * (r + r * r) ** a / (1 + r + r * r) ** (1 + 3 * a / 2), [0, 1, mp.inf])
        assert float(total) == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("bad", [-1, -3, float("nan"), float("inf"), 25])
    def test_domain(self, bad):
        with pytest.raises(DomainError):
            normalization_constant(bad)


class TestDensity:
    def test_zero_at_origin(self):
        assert density(1, 0.0) == 0.0

    def test_alpha_zero_limit_at_origin(self):
        assert density(0, 0.0) == pytest.approx(normalization_constant(0))

    def test_alpha_one_at_one(self):
        assert density(1, 1.0) == pytest.approx(27 / 8 * 2 / 3 ** 2.5, rel=1e-12)
        assert density(1, 1.0) == pytest.approx(0.4330127018922193, abs=1e-12)

    @pytest.mark.parametrize("r", [0.1, 0.5, 2.0, 10.0])
    def test_inversion_symmetry(self, r):
        assert density(2, r) == pytest.approx(density(2, 1 / r) / r ** 2, rel=1e-14)

    def test_negative_r(self):
        with pytest.raises(DomainError):
            density(1, -0.1)

    def test_vectorised(self):
        r = np.linspace(0, 3, 7)
        np.testing.assert_allclose(density(4, r), [density(4, x) for x in r], rtol=1e-15)

    @settings(max_examples=200, deadline=None)
    @given(alpha=st.sampled_from(TABLE_ALPHAS), r=st.floats(min_value=1e-3, max_value=100.0))
    def test_symmetry_property(self, alpha, r):
        lhs = density(alpha, r) * r * r
        rhs = density(alpha, 1 / r)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-300)


class TestCsrd:
    @pytest.mark.parametrize("alpha", [1, 2, 8])
    def test_median_closed_form(self, alpha):
        assert csrd(alpha, 1.0) == pytest.approx(0.5, abs=1e-14)

    @pytest.mark.parametrize("alpha", TABLE_ALPHAS)
    def test_median_all(self, alpha):
        assert csrd(alpha, 1.0) == pytest.approx(0.5, abs=1e-10)

    @pytest.mark.parametrize("s", [0.2, 0.7, 1.5, 4.0])
    def test_alpha_eight_closed_vs_quadrature(self, s):
        assert abs(csrd_closed_form(8, s) - csrd_quadrature(8, s)) < 1e-8

    @pytest.mark.parametrize("alpha", [1, 2, 4, 8])
    def test_closed_form_fidelity_grid(self, alpha):
        s = np.round(np.arange(1, 101) * 0.1, 10)
        np.testing.assert_allclose(csrd_closed_form(alpha, s), csrd_quadrature(alpha, s), atol=1e-8, rtol=0)

    @pytest.mark.parametrize("alpha", [1, 2, 4, 8])
    def test_closed_form_against_mpmath(self, alpha):
        mp.mp.dps = 25
        c = mp.mpf(MPMATH_C[alpha])
        a = mp.mpf(alpha)
        for s in (0.05, 0.9, 3.3):
            ref = mp.quad(lambda r: c * (r + r * r) ** a / (1 + r + r * r) ** (1 + 3 * a / 2), [0, s])
            assert csrd(alpha, s) == pytest.approx(float(ref), abs=1e-10)

    @pytest.mark.parametrize("alpha", TABLE_ALPHAS)
    def test_limits_and_monotone(self, alpha):
        s = np.concatenate([[0.0], np.geomspace(1e-3, 1e9, 80)])
        v = csrd(alpha, s)
        assert v[0] == 0.0
        assert np.all(np.diff(v) >= -1e-12)
        assert v[-1] == pytest.approx(1.0, abs=1e-5)
        assert csrd(alpha, np.inf) == pytest.approx(1.0)

    @pytest.mark.parametrize("alpha", [0, 1.25, 2, 5, 13])
    def test_derivative_matches_density(self, alpha):
        h = 1e-5
        for s in (0.3, 0.8, 1.7, 3.0):
            deriv = (csrd(alpha, s + h) - csrd(alpha, s - h)) / (2 * h)
            assert deriv == pytest.approx(density(alpha, s), abs=1e-6)

    def test_negative_s(self):
        with pytest.raises(DomainError):
            csrd(1, -1.0)

    def test_no_closed_form(self):
        with pytest.raises(DomainError):
            csrd_closed_form(3, 0.5)

    @pytest.mark.parametrize("alpha", [0, 1, 1.25, 2.5, 4, 7, 13, 14])
    def test_fast_table_matches_quadrature(self, alpha):
        s = np.array([0.0, 0.01, 0.1, 0.45, 1.0, 1.9, 5.0, 20.0, 300.0])
        np.testing.assert_allclose(csrd_fast(alpha, s), csrd_quadrature(alpha, s), atol=1e-9)


class TestAlphaTable:
    @pytest.mark.parametrize("k,m,alpha", [(2, 2, 2), (4, 3, 5), (1, 1, 1), (2, 3, 1.25), (3, 4, 2.5),
                                           (1, 2, 0), (4, 1, 13), (3, 1, 8), (2, 1, 4), (4, 4, 4)])
    def test_entries(self, k, m, alpha):
        assert alpha_for(k, m) == alpha

    def test_full_table(self):
        expected = [[1, 0, 0, 0], [4, 2, 1.25, 1], [8, 4, 3, 2.5], [13, 7, 5, 4]]
        for k in range(1, 5):
            assert [alpha_for(k, m) for m in range(1, 5)] == expected[k - 1]

    def test_approximate_flags(self):
        assert analytics.APPROXIMATE_ENTRIES == {(1, 2), (1, 3), (1, 4), (2, 3), (3, 4)}

    @pytest.mark.parametrize("k,m", [(0, 1), (5, 1), (1, 5), (2, 0)])
    def test_out_of_range(self, k, m):
        with pytest.raises(LookupError, match="1 <= k <= 4"):
            alpha_for(k, m)


def test_analytic_curve():
    c = AnalyticCurve(4)
    assert c.eval_mode == "closed_form_cdf"
    assert AnalyticCurve(1.25).eval_mode == "quadrature_cdf"
    assert c.c_alpha == pytest.approx(MPMATH_C[4], rel=1e-10)
    assert c.cdf(1.0) == pytest.approx(0.5)
    assert c.pdf(1.0) == pytest.approx(density(4, 1.0))
