import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
import hypothesis.extra.numpy as npst

from ecfnorm.epps_pulley import (
    PUBLISHED_EP_TABLE,
    CriticalRow,
    EpCriticalTable,
    QuadratureSettings,
    ep_quadrature_oracle,
    ep_statistic,
    ep_t_rows,
    ep_test,
    kernel_sum_pairwise,
    kernel_sum_rows,
)
from ecfnorm.errors import DegenerateSample, EmptyInput, UnsupportedAlpha
from ecfnorm.stat_core import StudentizedSample, studentize

# Hand arithmetic for z = {-1, 1}: (1 + e^-2) - 2 sqrt(2) e^-1/4 + 2/sqrt(3).
T2_HAND = 1 + math.exp(-2) - 2 * math.sqrt(2) * math.exp(-0.25) + 2 / math.sqrt(3)

zs = npst.arrays(np.float64, st.integers(1, 40),
                 elements=st.floats(-6, 6, allow_nan=False, allow_infinity=False))


def raw(z):
    return StudentizedSample(np.asarray(z, dtype=float), 0.0, 1.0, "n")


class TestStatistic:
    def test_two_point_hand_value(self):
        i_n, t_n = ep_statistic(raw([-1.0, 1.0]))
        assert T2_HAND == pytest.approx(0.0872546, abs=5e-8)
        assert t_n == pytest.approx(T2_HAND, abs=1e-14)
        assert i_n == pytest.approx(T2_HAND / 2, abs=1e-14)

    def test_as_printed_form_differs(self):
        _, ref = ep_statistic(raw([-1.0, 1.0]), "reference")
        _, printed = ep_statistic(raw([-1.0, 1.0]), "as_printed")
        hand = 1 + math.exp(-2) - 2 * 2 * math.exp(-0.5) + 2 / math.sqrt(3)
        assert printed == pytest.approx(hand, abs=1e-14)
        # A weighted squared distance cannot be negative; the printed variant is.
        assert printed < 0 < ref

    def test_unknown_form(self):
        with pytest.raises(ValueError):
            ep_statistic(raw([0.0, 1.0]), "other")

    def test_empty(self):
        with pytest.raises(EmptyInput):
            ep_statistic(raw([]))

    @given(zs)
    def test_nonnegative(self, z):
        i_n, t_n = ep_statistic(raw(z))
        assert i_n >= -1e-12
        assert t_n == pytest.approx(z.size * i_n, rel=1e-12, abs=1e-300)

    @given(zs, st.randoms(use_true_random=False))
    def test_permutation_and_sign_flip_exact(self, z, rnd):
        perm = list(z)
        rnd.shuffle(perm)
        base = ep_statistic(raw(z))
        assert ep_statistic(raw(perm)) == base
        assert ep_statistic(raw(-z)) == base

    @settings(max_examples=60)
    @given(npst.arrays(np.float64, st.integers(1, 300),
                       elements=st.floats(-25, 25, allow_nan=False, allow_infinity=False)))
    def test_series_matches_pairwise(self, z):
        series = kernel_sum_rows(z[None, :])[0]
        pairwise = kernel_sum_pairwise(z)
        assert series == pytest.approx(pairwise, rel=1e-12)

    def test_series_large_n_heavy_tail(self):
        x = np.random.default_rng(11).standard_t(2, 2000)
        s = studentize(x)
        assert ep_statistic(s)[1] == pytest.approx(ep_statistic(s, method="pairwise")[1], rel=1e-12)

    def test_rows_independent_of_batch(self):
        rng = np.random.default_rng(12)
        z = rng.standard_normal((5, 30))
        z[2] *= 8  # a row needing many more series terms
        batch = ep_t_rows(z)
        for i in range(5):
            assert ep_t_rows(z[i:i + 1])[0] == batch[i]


class TestQuadratureOracle:
    def test_two_point(self):
        val = ep_quadrature_oracle(raw([-1.0, 1.0]))
        assert val == pytest.approx(T2_HAND / 2, abs=1e-12)

    def test_oracle_equivalence_random_samples(self):
        rng = np.random.default_rng(2024)
        worst = 0.0
        for _ in range(100):
            n = int(rng.integers(2, 51))
            s = studentize(rng.standard_t(3, n))
            i_n, _ = ep_statistic(s)
            worst = max(worst, abs(i_n - ep_quadrature_oracle(s)))
        assert worst < 1e-6

    def test_null_limit(self):
        s = studentize(np.random.default_rng(3).standard_normal(5000))
        assert 0 <= ep_quadrature_oracle(s) < 1e-3

    def test_settings_validated(self):
        with pytest.raises(ValueError):
            QuadratureSettings(1.0, -1.0)
        with pytest.raises(ValueError):
            QuadratureSettings(nodes=1)

    def test_coarse_grid_is_less_accurate(self):
        s = studentize(np.random.default_rng(4).standard_t(3, 50))
        exact = ep_statistic(s)[0]
        fine = ep_quadrature_oracle(s)
        coarse = ep_quadrature_oracle(s, QuadratureSettings(nodes=8))
        assert abs(fine - exact) < abs(coarse - exact)


class TestCriticalTable:
    def test_published_rows_increase(self):
        q = [r.q95 for r in PUBLISHED_EP_TABLE.rows.values()]
        assert q == sorted(q)
        assert q[0] == 0.370 and q[-1] == 0.377

    def test_lookup(self):
        assert PUBLISHED_EP_TABLE.critical_value(1000) == 0.377
        assert PUBLISHED_EP_TABLE.critical_value(20) == 0.370
        assert PUBLISHED_EP_TABLE.critical_value(10**5) == 0.377
        # 1/75 sits two thirds of the way from 1/50 to 1/100.
        assert PUBLISHED_EP_TABLE.critical_value(75) == pytest.approx(0.370 + 2 / 3 * 0.003, abs=1e-12)

    def test_sqrt_n_scaling(self):
        t = EpCriticalTable({50: CriticalRow(0.886 / math.sqrt(50)), 100: CriticalRow(0.886 / 10)},
                            sqrt_n_scaled=True)
        assert t.critical_value(75) == pytest.approx(0.886 / math.sqrt(75), rel=1e-12)
        assert t.critical_value(400) == pytest.approx(0.886 / 20, rel=1e-12)

    def test_csv_round_trip(self):
        t = EpCriticalTable({10: CriticalRow(0.31, 0.12, 0.014), 20: CriticalRow(0.33, 0.125, 0.0145)},
                            "self_simulated", 5000, 77)
        text = t.to_csv()
        assert text.splitlines()[1] == "n,q95,mean,variance,provenance,m,seed"
        back = EpCriticalTable.from_csv(text)
        assert back == t
        assert back.to_csv() == text
        assert EpCriticalTable.from_csv(PUBLISHED_EP_TABLE.to_csv()) == PUBLISHED_EP_TABLE

    def test_rejects_foreign_csv(self):
        with pytest.raises(ValueError):
            EpCriticalTable.from_csv("n,q95\n1,2\n")

    def test_empty_table(self):
        with pytest.raises(ValueError):
            EpCriticalTable({})


class TestEpTest:
    def test_decision_rule(self):
        rng = np.random.default_rng(9)
        seen = set()
        for dist in (rng.standard_normal, lambda n: rng.laplace(size=n)):
            r = ep_test(dist(1000))
            assert r.critical_value == 0.377
            assert r.reject == (r.t_n > 0.377)
            assert r.t_n == pytest.approx(r.n * r.i_n, rel=1e-12)
            seen.add(r.reject)
        assert seen == {False, True}

    def test_unsupported_alpha(self):
        with pytest.raises(UnsupportedAlpha):
            ep_test(np.arange(10.0), alpha=0.1)

    def test_degenerate(self):
        with pytest.raises(DegenerateSample):
            ep_test([1.0, 1.0, 1.0])

    @settings(max_examples=40)
    @given(npst.arrays(np.float64, st.integers(3, 60), elements=st.floats(-100, 100)),
           st.floats(0.01, 100), st.floats(-1e3, 1e3), st.booleans())
    def test_affine_invariance(self, x, a, b, flip):
        assume(np.ptp(x) > 1e-3 * max(1.0, np.abs(x).max()))
        r0 = ep_test(x)
        r1 = ep_test((-a if flip else a) * x + b)
        assert r1.t_n == pytest.approx(r0.t_n, abs=1e-9)
