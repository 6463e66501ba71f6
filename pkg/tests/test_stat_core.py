import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
import hypothesis.extra.numpy as npst
from numpy.testing import assert_allclose

from ecfnorm.errors import DegenerateSample, EmptyInput, InvalidPoint, ZeroModulus
from ecfnorm.stat_core import (
    Sample,
    StudentizedSample,
    asymptotic_coeff,
    ecf_at,
    ecft_standardized_rows,
    ecft_test,
    studentize,
    vn_statistic,
)

finite = dict(allow_nan=False, allow_infinity=False, min_value=-1e3, max_value=1e3)
samples = npst.arrays(np.float64, st.integers(2, 60), elements=st.floats(**finite))


def spread(x):
    # Enough spread that studentization is numerically meaningful.
    return np.ptp(x) > 1e-3 * max(1.0, np.abs(x).max())


def test_sample_rejects_non_finite():
    with pytest.raises(ValueError):
        Sample([1.0, np.nan])
    with pytest.raises(EmptyInput):
        Sample([])


class TestStudentize:
    def test_two_point(self):
        s = studentize([-1.0, 1.0], divisor="n")
        assert_allclose(s.z, [-1.0, 1.0])
        assert s.mu_hat == 0.0
        assert s.sigma_hat == 1.0

    def test_four_point(self):
        s = studentize([-2.0, -1.0, 1.0, 2.0], divisor="n")
        assert s.sigma_hat == pytest.approx(math.sqrt(2.5))
        assert_allclose(s.z, [-1.264911, -0.632456, 0.632456, 1.264911], atol=1e-6)

    @pytest.mark.parametrize("divisor", ["n", "n-1"])
    def test_constant_is_degenerate(self, divisor):
        with pytest.raises(DegenerateSample):
            studentize([5.0, 5.0, 5.0], divisor)

    def test_single_value_is_degenerate(self):
        with pytest.raises(DegenerateSample):
            studentize([1.0])

    def test_unknown_divisor(self):
        with pytest.raises(ValueError):
            studentize([1.0, 2.0], "n+1")

    @given(samples, st.sampled_from(["n", "n-1"]))
    def test_moments(self, x, divisor):
        assume(spread(x))
        s = studentize(x, divisor)
        n = s.n
        assert abs(s.z.mean()) < 1e-10 * n
        assert abs(s.z.var(ddof=0 if divisor == "n" else 1) - 1.0) < 1e-10 * n
        assert s.sigma_hat > 0


class TestEcf:
    def test_at_zero(self):
        phi = ecf_at([0.3, -2.0, 7.5], 0.0)
        assert (phi.re, phi.im) == (1.0, 0.0)

    def test_two_point(self):
        phi = ecf_at([-1.0, 1.0], 1.0)
        assert phi.re == pytest.approx(0.5403023, abs=1e-7)
        assert phi.im == pytest.approx(0.0, abs=1e-15)

    def test_single_point(self):
        phi = ecf_at([0.7], 2.0)
        assert phi.re == pytest.approx(math.cos(1.4))
        assert phi.im == pytest.approx(math.sin(1.4))
        assert phi.modulus == pytest.approx(1.0)

    def test_empty(self):
        with pytest.raises(EmptyInput):
            ecf_at([], 1.0)

    @given(samples, st.floats(-20, 20))
    def test_modulus_and_conjugate_symmetry(self, x, t):
        phi = ecf_at(x, t)
        assert phi.re**2 + phi.im**2 <= 1 + 1e-12
        neg, conj = ecf_at(x, -t), phi.conjugate()
        assert (neg.re, neg.im) == (conj.re, conj.im)


class TestVn:
    def test_two_point(self):
        s = StudentizedSample(np.array([-1.0, 1.0]), 0.0, 1.0, "n")
        assert vn_statistic(s, 1.0) == pytest.approx(math.log(math.cos(1.0)) + 0.5, abs=1e-12)
        assert vn_statistic(s, 1.0) == pytest.approx(-0.1156334, abs=1e-3)

    def test_four_point(self):
        s = studentize([-2.0, -1.0, 1.0, 2.0], divisor="n")
        # Direct evaluation: mean of cos over the four points, imaginary part vanishes.
        expected = math.log(np.cos(s.z).mean()) + 0.5
        v = vn_statistic(s, 1.0)
        assert v == pytest.approx(expected, abs=1e-14)
        assert -0.12 < v < -0.06

    def test_null_modulus_gives_zero(self):
        # Two points at +-a with cos(a) = exp(-1/2).
        a = math.acos(math.exp(-0.5))
        s = StudentizedSample(np.array([-a, a]), 0.0, a, "n")
        assert vn_statistic(s, 1.0) == pytest.approx(0.0, abs=1e-14)

    def test_zero_point(self):
        s = studentize([1.0, 2.0, 4.0])
        with pytest.raises(InvalidPoint):
            vn_statistic(s, 0.0)

    def test_zero_modulus(self):
        # cos and sin terms cancel exactly in floating point.
        s = StudentizedSample(np.array([0.0, 0.0, -math.pi, math.pi]), 0.0, 1.0, "n")
        with pytest.raises(ZeroModulus):
            vn_statistic(s, 1.0)

    @given(samples, st.floats(0.05, 5))
    def test_upper_bound(self, x, t):
        assume(spread(x))
        s = studentize(x)
        try:
            v = vn_statistic(s, t)
        except ZeroModulus:
            return
        assert v <= t * t / 2 + 1e-12


class TestAsymptoticCoeff:
    def test_zero(self):
        assert asymptotic_coeff(0.0) == 0.0

    def test_one(self):
        c = asymptotic_coeff(1.0)
        assert c == pytest.approx(math.cosh(1.0) - 1.5, rel=1e-15)
        assert c == pytest.approx(0.0430806, abs=1e-7)
        assert round(c, 4) == 0.0431

    def test_half(self):
        c = asymptotic_coeff(0.5)
        assert c == pytest.approx(math.cosh(0.25) - 1 - 0.03125, rel=1e-12)
        series = 0.5**8 / 24 + 0.5**12 / 720 + 0.5**16 / 40320
        assert c == pytest.approx(series, rel=1e-9)
        assert c == pytest.approx(1.631e-4, rel=1e-3)

    def test_small_t_has_no_cancellation(self):
        t = 1e-3
        assert asymptotic_coeff(t) == pytest.approx(t**8 / 24, rel=1e-12)

    def test_branch_continuity(self):
        t = math.sqrt(2.0)
        lo, hi = asymptotic_coeff(t * (1 - 1e-12)), asymptotic_coeff(t * (1 + 1e-12))
        assert lo == pytest.approx(hi, rel=1e-9)

    @given(st.floats(-3, 3))
    def test_nonnegative(self, t):
        c = asymptotic_coeff(t)
        assert c >= 0
        if t != 0 and abs(t) > 1e-3:
            assert c > 0


class TestEcftTest:
    def test_two_point_chain(self):
        r = ecft_test([-1.0, 1.0], t=1.0, alpha=0.05, divisor="n")
        expected = (math.log(math.cos(1.0)) + 0.5) * math.sqrt(2) / math.sqrt(math.cosh(1) - 1.5)
        assert r.standardized == pytest.approx(expected, rel=1e-12)
        assert r.standardized == pytest.approx(-0.7878, abs=2e-3)
        assert not r.reject
        assert r.n == 2

    def test_rounded_constant(self):
        x = np.random.default_rng(5).standard_normal(300)
        r = ecft_test(x)
        # 1/sqrt(c(1)) = 4.8179; the rounded 0.0431 gives 4.8168, 2.3e-4 relative apart.
        assert r.standardized / (math.sqrt(r.n) * r.v_n) == pytest.approx(4.8168, rel=5e-4)

    def test_p_value_invariant(self):
        from scipy.stats import norm

        x = np.random.default_rng(6).laplace(size=120)
        r = ecft_test(x, alpha=0.1)
        assert r.p_value == pytest.approx(2 * (1 - norm.cdf(abs(r.standardized))), abs=1e-12)
        assert r.reject == (r.p_value < r.alpha)
        assert r.reject == (abs(r.standardized) > norm.ppf(0.95))

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1])
    def test_bad_alpha(self, alpha):
        with pytest.raises(ValueError):
            ecft_test([1.0, 2.0, 3.0], alpha=alpha)

    def test_bad_point(self):
        with pytest.raises(InvalidPoint):
            ecft_test([1.0, 2.0, 3.0], t=0.0)

    def test_degenerate(self):
        with pytest.raises(DegenerateSample):
            ecft_test([2.0, 2.0, 2.0, 2.0])

    @settings(max_examples=50)
    @given(samples, st.floats(0.1, 100), st.floats(-100, 100), st.booleans())
    def test_affine_invariance(self, x, a, b, flip):
        assume(spread(x))
        a = -a if flip else a
        r0 = ecft_test(x)
        r1 = ecft_test(a * x + b)
        assert r1.standardized == pytest.approx(r0.standardized, abs=1e-9)

    def test_rows_match_single(self):
        x = np.random.default_rng(8).standard_t(5, size=(7, 40))
        rows = ecft_standardized_rows(x)
        for i in range(7):
            assert rows[i] == pytest.approx(ecft_test(x[i]).standardized, abs=1e-12)
