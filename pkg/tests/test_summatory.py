import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mertenslab import summatory
from mertenslab.errors import CapabilityError, RangeError

import oracles

LOG2 = math.log(2)


class TestMertens:
    def test_hand_values(self, store_1e5):
        assert store_1e5.mertens(1) == 1
        assert store_1e5.mertens(10) == -1
        assert store_1e5.mertens(10.9) == -1

    def test_powers_of_ten(self, store_1e5):
        known = {10: -1, 100: 1, 1000: 2, 10 ** 4: -23, 10 ** 5: -48}
        for x, expect in known.items():
            assert store_1e5.mertens(x) == expect, x

    def test_matches_dense_oracle(self, store_1e5):
        m_oracle = oracles.mertens_dense(10 ** 5)
        xs = np.concatenate((np.arange(1, 300),
                             np.linspace(300, 10 ** 5, 500).astype(int)))
        got = store_1e5.mertens_many(xs.astype(float))
        assert np.array_equal(got, m_oracle[xs])

    @settings(max_examples=30, deadline=None)
    @given(a=st.integers(min_value=1, max_value=10 ** 5 - 1),
           width=st.integers(min_value=1, max_value=3000))
    def test_window_resum_exact(self, store_1e5, a, width):
        b = min(a + width, 10 ** 5)
        mu = store_1e5.mobius_range(a, b + 1)
        assert int(mu.sum()) == store_1e5.mertens(b) - store_1e5.mertens(a) + int(mu[0])

    def test_bounds(self, store_1e5):
        with pytest.raises(RangeError):
            store_1e5.mertens(0.5)
        with pytest.raises(CapabilityError) as err:
            store_1e5.mertens(10 ** 6)
        assert err.value.max_usable == 10 ** 5


class TestSmoothedSum:
    def test_trivial_and_hand_values(self, store_1e5):
        assert store_1e5.big_f(1) == 0.0
        assert store_1e5.big_f(2) == pytest.approx(LOG2, abs=1e-15)
        assert store_1e5.big_f(4) == pytest.approx(math.log(1.5), abs=1e-15)

    def test_integral_route_hand_values(self, store_1e5):
        assert store_1e5.big_f_integral(1) == 0.0
        assert store_1e5.big_f_integral(2) == pytest.approx(LOG2, abs=1e-15)
        assert store_1e5.big_f_integral(4) == pytest.approx(math.log(1.5), abs=1e-15)

    def test_against_naive_summation(self, store_1e5):
        mu = oracles.mobius_dense(2000)
        for x in (2.0, 17.3, 100.0, 999.5, 2000.0):
            want = oracles.big_f_naive(x, mu)
            assert store_1e5.big_f(x) == pytest.approx(want, abs=1e-10)

    @settings(max_examples=40, deadline=None)
    @given(x=st.floats(min_value=1.0, max_value=10 ** 5, allow_nan=False))
    def test_dual_route_agreement(self, store_1e5, x):
        f_sum = store_1e5.big_f(x)
        f_int = store_1e5.big_f_integral(x)
        assert abs(f_sum - f_int) <= 1e-9 * (1.0 + abs(f_sum) + math.log(x))

    def test_h_parametrization(self, store_1e5):
        assert store_1e5.h_smoothed(1) == 0.0
        assert store_1e5.h_smoothed(2) == pytest.approx(LOG2 / 2, abs=1e-15)
        assert store_1e5.h_mertens(10) == pytest.approx(-0.1, abs=0)
        y = 12345.6
        assert summatory.x_from_y(y) == pytest.approx(math.log(y) ** 2)
        assert summatory.y_from_x(summatory.x_from_y(y)) == pytest.approx(y)

    def test_h_bounded_by_one(self, store_1e5):
        ys = np.geomspace(1.0, 10 ** 5, 500)
        vals = store_1e5.big_f_many(ys) / ys
        assert np.abs(vals).max() <= 1.0 + 1e-9


class TestWeightedSums:
    def test_g_weighted_hand_values(self, store_1e5):
        assert store_1e5.g_weighted(1) == 0.0
        assert store_1e5.g_weighted(2) == pytest.approx(LOG2 ** 2, rel=1e-13)
        assert store_1e5.g_weighted(4) == pytest.approx(math.log(4) ** 2, rel=1e-13)

    def test_g_weighted_matches_direct(self, store_1e5):
        for x in (37.0, 500.5, 4096.0):
            direct = math.log(x) * sum(store_1e5.big_f(x / n)
                                       for n in range(1, int(x) + 1))
            assert store_1e5.g_weighted(x) == pytest.approx(direct, rel=1e-11)

    def test_log_square_sum(self):
        v, r = summatory.log_square_sum(1.0)
        assert v == 0.0 and r == -2.0
        v, r = summatory.log_square_sum(2.0)
        assert v == pytest.approx(LOG2 ** 2, abs=1e-15)
        assert r == pytest.approx(LOG2 ** 2 - 4.0, abs=1e-15)
        with pytest.raises(RangeError):
            summatory.log_square_sum(0.5)

    def test_lambda_over_n(self, store_1e5):
        v, r = store_1e5.lambda_over_n_sum(2.0)
        assert v == pytest.approx(LOG2 / 2, abs=1e-15)
        assert r == pytest.approx(LOG2 / 2 - LOG2, abs=1e-15)
        v, r = store_1e5.lambda_over_n_sum(3.0)
        assert r == pytest.approx(LOG2 / 2 + math.log(3) / 3 - math.log(3), abs=1e-14)

    def test_lambda_over_n_remainder_window(self, store_1e5):
        for x in np.geomspace(2, 10 ** 5, 60):
            _, r = store_1e5.lambda_over_n_sum(float(x))
            assert -1.8 <= r <= 0.0, x


class TestPsiAndWeights:
    def test_psi_hand_value(self, store_1e5):
        assert store_1e5.psi(4) == pytest.approx(2 * LOG2 + math.log(3), rel=1e-15)
        assert store_1e5.psi(1) == 0.0

    def test_psi_chebyshev_window(self, store_1e5):
        assert 0.9 <= store_1e5.psi(10 ** 5) / 10 ** 5 <= 1.1

    def test_psi_nondecreasing_checkpoints(self, store_1e5):
        assert np.all(np.diff(store_1e5.pp_cum_lam) >= 0)

    def test_lambda2_sum_hand_value(self, store_1e5):
        got = store_1e5.lambda2_sum(10)
        want = (LOG2 ** 2 + 2 * LOG2 * math.log(3) + 2 * LOG2 ** 2
                + 2 * LOG2 * math.log(5) + math.log(3) ** 2          # Lambda*Lambda
                + LOG2 ** 2 + math.log(3) ** 2 + 2 * LOG2 ** 2
                + math.log(5) ** 2 + math.log(7) ** 2
                + 3 * LOG2 ** 2 + 2 * math.log(3) ** 2)              # Lambda log
        assert got == pytest.approx(want, rel=1e-12)

    def test_sparse_vs_dense_sums(self, store_1e5, table_2e4):
        sparse_l2 = [store_1e5.lambda2_sum(x) for x in (100, 4096, 19999)]
        sparse_th = [store_1e5.theta_sum(x) for x in (100, 4096, 19999)]
        store_1e5.attach_table(table_2e4)
        try:
            for x, sl, st_ in zip((100, 4096, 19999), sparse_l2, sparse_th):
                dense_l2 = store_1e5.lambda2_sum(x)
                dense_th = store_1e5.theta_sum(x)
                assert dense_l2 == pytest.approx(sl, rel=1e-10), x
                assert dense_th == pytest.approx(st_, rel=1e-10), x
        finally:
            store_1e5.table_cap = 0
            store_1e5._s_lambda2 = None
            store_1e5._s_theta = None

    def test_lambda_range_scatter(self, store_1e5):
        lam = store_1e5.lambda_range(7990, 8010)
        for n in range(7990, 8010):
            assert lam[n - 7990] == pytest.approx(oracles.lambda_trial(n),
                                                  abs=1e-14), n


class TestExport:
    def test_rows_schema(self, store_1e5, table_2e4):
        store_1e5.attach_table(table_2e4)
        try:
            rows = store_1e5.export_rows([1.0, 10.0, 100.0])
            assert list(rows[0]) == ["x", "M", "F_sum", "F_integral", "psi",
                                     "S_lambda2"]
            assert rows[1]["M"] == -1
            assert isinstance(rows[1]["M"], int)
        finally:
            store_1e5.table_cap = 0
            store_1e5._s_lambda2 = None
            store_1e5._s_theta = None

    def test_stride_mismatch_rejected(self):
        with pytest.raises(RangeError):
            summatory.PrefixSums(1000, stride=100, segment_size=256)


class TestConstructionDeterminism:
    def test_worker_count_invariant(self):
        a = summatory.PrefixSums(10 ** 5, workers=1)
        b = summatory.PrefixSums(10 ** 5, workers=3)
        assert np.array_equal(a.cp_m, b.cp_m)
        assert np.array_equal(a.cp_a, b.cp_a)
        assert np.array_equal(a.cp_fint, b.cp_fint)
        assert np.array_equal(a.pp, b.pp)
        assert np.array_equal(a.pp_lam, b.pp_lam)

    def test_mertens_bounded_by_index(self, store_1e5):
        ks = np.geomspace(1, 10 ** 5, 200)
        ms = store_1e5.mertens_many(ks)
        assert np.all(np.abs(ms) <= np.floor(ks))


def test_log_square_remainder_at_1e6():
    v, r = summatory.log_square_sum(10 ** 6)
    assert abs(r) <= 5 * math.log(10 ** 6) ** 2
