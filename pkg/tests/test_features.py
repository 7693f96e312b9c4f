import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import dft_oracle, dtw_oracle
from quiver.errors import EmptySeries, LengthMismatch, SeriesTooShort
from quiver.features import (
    LFT_CUTOFF_HZ,
    basic_stats,
    dominant_frequency,
    dtw_distance,
    lft_distance,
    lft_distances,
    mad_zscores,
    piecewise_constant,
    resample_locf,
    slice_weeks,
    weekly_features,
    znormalize,
)


class TestBasicStats:
    def test_direct_formula(self):
        rng, mean, std = basic_stats([2, 4, 6])
        assert rng == 4 and mean == 4
        assert std == pytest.approx(math.sqrt(8 / 3))

    def test_single_sample(self):
        assert basic_stats([5]) == (0, 5, 0)

    def test_empty_rejected(self):
        with pytest.raises(EmptySeries):
            basic_stats([])


class TestDtw:
    def test_identity(self):
        for x in ([1.0], [0, 1, 2, 1], np.sin(np.arange(20))):
            assert dtw_distance(x, x) == 0.0

    def test_warp_absorbs_shift(self):
        assert dtw_distance([0, 0, 1, 1], [0, 1, 1, 1]) == 0.0

    def test_all_cost_one(self):
        assert dtw_distance([0, 0], [1, 1]) == 2.0

    def test_empty_rejected(self):
        with pytest.raises(EmptySeries):
            dtw_distance([], [1])

    def test_exhaustive_tiny_vs_oracle(self):
        # every pair with lengths <= 3 over {0,1,2}: small slice of the
        # acceptance-scale equivalence check
        seqs = [list(s) for n in (1, 2, 3) for s in itertools.product((0, 1, 2), repeat=n)]
        for a in seqs:
            for b in seqs:
                assert dtw_distance(a, b) == dtw_oracle(a, b)

    @given(
        st.lists(st.integers(0, 2), min_size=1, max_size=8),
        st.lists(st.integers(0, 2), min_size=1, max_size=8),
    )
    @settings(max_examples=200, deadline=None)
    def test_random_pairs_vs_oracle(self, a, b):
        d = dtw_distance(a, b)
        assert d == dtw_oracle(a, b)
        assert d == dtw_distance(b, a)
        assert d >= 0


class TestLft:
    def test_identical_signals(self):
        x = np.sin(np.arange(120) / 10.0)
        assert lft_distance(x, x, 60.0) == 0.0

    def test_constants_normalize_to_zero(self):
        assert lft_distance(np.full(64, 3.0), np.full(64, 9.9), 60.0) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            lft_distance(np.ones(10), np.ones(11), 60.0)

    def _oracle_lft(self, x, ref, period):
        def spec(sig):
            s = np.abs(dft_oracle(znormalize(sig)))
            freqs = np.fft.fftfreq(len(sig), d=period)
            s[np.abs(freqs) > LFT_CUTOFF_HZ] = 0.0
            return s

        return float(np.linalg.norm(spec(x) - spec(ref)))

    def test_noise_vs_constant_ordering(self):
        # 4 h of 60 s samples; square wave with a 2 h period
        rng = np.random.default_rng(3)
        t = np.arange(240) * 60.0
        square = np.where((t // 3600.0) % 2 == 0, 1.0, 0.0)
        noisy = square + rng.normal(0, 0.1, square.size)
        d_noisy = lft_distance(noisy, square, 60.0)
        d_const = lft_distance(np.zeros_like(square), square, 60.0)
        assert d_noisy < d_const
        assert d_noisy == pytest.approx(self._oracle_lft(noisy, square, 60.0), rel=1e-9)
        assert d_const == pytest.approx(self._oracle_lft(np.zeros_like(square), square, 60.0), rel=1e-9)

    def test_affine_invariance(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=200)
        ref = rng.normal(size=200)
        base = lft_distance(x, ref, 60.0)
        assert lft_distance(3.5 * x + 11.0, ref, 60.0) == pytest.approx(base, rel=1e-9)
        # negative scale on an even-symmetric signal (even under n -> N-n mod N)
        sym = np.cos(2 * np.pi * np.arange(200) * 4 / 200.0)
        assert lft_distance(-2.0 * sym + 1.0, ref, 60.0) == pytest.approx(
            lft_distance(sym, ref, 60.0), rel=1e-9)

    def test_batch_matches_pairwise(self):
        rng = np.random.default_rng(7)
        mat = rng.normal(size=(6, 120))
        mat[2] = 4.2  # constant row
        ref = rng.normal(size=120)
        batch = lft_distances(mat, ref, 60.0)
        for row, expected in zip(mat, batch):
            assert lft_distance(row, ref, 60.0) == pytest.approx(expected, rel=1e-12, abs=1e-12)

    def test_parseval_identity(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            x = rng.normal(size=int(rng.integers(8, 300)))
            X = np.fft.fft(x)
            lhs = np.sum(np.abs(x) ** 2)
            rhs = np.sum(np.abs(X) ** 2) / x.size
            assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))


class TestWeeklyFeatures:
    def test_constant_conventions(self):
        fv = weekly_features(np.full(16, 7.0), 60.0)
        assert fv.values == {
            "mean": 7.0, "variance": 0.0, "dominant_frequency": 0.0,
            "noise": 0.0, "skewness": 0.0, "kurtosis": 0.0,
        }

    def test_symmetric_skewness_zero(self):
        fv = weekly_features([1, 2, 3, 4], 60.0)
        assert fv.values["skewness"] == pytest.approx(0.0, abs=1e-12)

    def test_too_short(self):
        with pytest.raises(SeriesTooShort):
            weekly_features([1, 2, 3], 60.0)

    def test_moments_match_two_pass_oracle(self):
        rng = np.random.default_rng(13)
        x = rng.normal(3.0, 2.0, size=500)
        fv = weekly_features(x, 60.0)
        mean = sum(x) / len(x)
        m2 = sum((v - mean) ** 2 for v in x) / len(x)
        m3 = sum((v - mean) ** 3 for v in x) / len(x)
        m4 = sum((v - mean) ** 4 for v in x) / len(x)
        assert fv.values["mean"] == pytest.approx(mean, rel=1e-12)
        assert fv.values["variance"] == pytest.approx(m2, rel=1e-12)
        assert fv.values["skewness"] == pytest.approx(m3 / m2 ** 1.5, rel=1e-12)
        assert fv.values["kurtosis"] == pytest.approx(m4 / m2 ** 2, rel=1e-12)

    def test_sine_dominant_frequency(self):
        # 7 days of a 24 h sine at one sample per minute
        t = np.arange(7 * 1440) * 60.0
        x = np.sin(2 * np.pi * t / 86400.0)
        fv = weekly_features(x, 60.0)
        bin_width = 1.0 / (x.size * 60.0)
        assert abs(fv.values["dominant_frequency"] - 1.0 / 86400.0) <= bin_width
        spec = np.abs(dft_oracle(x))[: x.size // 2]
        oracle_freq = np.argmax(spec[1:]) + 1
        assert fv.values["dominant_frequency"] == pytest.approx(oracle_freq / (x.size * 60.0))

    def test_noise_feature_is_residual_variance(self):
        rng = np.random.default_rng(17)
        x = np.repeat(rng.normal(size=6), 60)  # piecewise constant on 1 h segments
        assert weekly_features(x, 60.0).values["noise"] == pytest.approx(0.0, abs=1e-18)
        noisy = x + rng.normal(0, 0.5, x.size)
        resid = noisy - piecewise_constant(noisy, 60.0)
        assert weekly_features(noisy, 60.0).values["noise"] == pytest.approx(resid.var())


class TestSliceWeeks:
    def test_full_year(self):
        times = np.arange(0, 365 * 86400.0, 3600.0)
        slices, dropped = slice_weeks(times, np.zeros_like(times), 0.0)
        assert len(slices) == 53 and not dropped
        last = slices[-1]
        assert last.t1 - last.t0 == pytest.approx(86400.0)  # 1-day closing week

    def test_single_week(self):
        times = np.arange(0, 7 * 86400.0, 3600.0)
        slices, dropped = slice_weeks(times, np.zeros_like(times), 0.0)
        assert len(slices) == 1
        assert dropped == list(range(1, 53))

    def test_partial_leading_week(self):
        start = 2.5 * 7 * 86400.0
        times = np.arange(start, start + 14 * 86400.0, 3600.0)
        slices, dropped = slice_weeks(times, np.zeros_like(times), 0.0)
        assert slices[0].index == 2
        assert len(slices[0].times) < len(slices[1].times)


def test_resample_locf():
    times = np.array([0.0, 100.0, 250.0])
    values = np.array([1.0, 2.0, 3.0])
    out = resample_locf(times, values, 0.0, 300.0, 60.0)
    np.testing.assert_array_equal(out, [1, 1, 2, 2, 2])


def test_mad_zscores_flags_outlier():
    x = np.array([10.0, 10.5, 9.5, 10.2, 9.8, 0.0])
    z = mad_zscores(x)
    assert z[-1] < -3.5
    assert np.all(np.abs(z[:-1]) < 3.5)
    assert np.all(mad_zscores(np.full(5, 2.0)) == 0.0)
