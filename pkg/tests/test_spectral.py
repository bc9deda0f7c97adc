import numpy as np
import pytest

from whittlemix.covariance import CovarianceSpec, acv_sequence
from whittlemix.errors import MaskError, SpectrumDomainError
from whittlemix.sampling import simulate_gaussian_process
from whittlemix.series import ObservedSeries
from whittlemix.spectral import (
    FrequencyGrid, expected_periodogram, expected_periodogram_complete,
    expected_periodogram_modulated, mask_pair_counts, modulated_acv,
    modulated_residual_periodogram, periodogram, taper_acv,
)

MATERN = CovarianceSpec("matern", 0.05, 2.0, 25.0, 1.5)


def double_sum_oracle(acv_seq, g, n):
    """O(n^2) expectation of the modulated periodogram, term by term."""
    lags = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    cov = acv_seq[lags]
    gg = np.outer(g, g)
    out = np.empty(n)
    t = np.arange(n)
    for k in range(n):  # frequency index in FFT order
        phase = np.exp(-2j * np.pi * k * np.subtract.outer(t, t) / n)
        out[k] = np.real(np.sum(gg * cov * phase)) / n
    return np.roll(out, (n - 1) // 2)


class TestFrequencyGrid:
    @pytest.mark.parametrize("n", [7, 8])
    def test_indices_cover_signed_range(self, n):
        grid = FrequencyGrid(n)
        assert grid.indices.size == n
        assert grid.indices[0] == -((n + 1) // 2) + 1
        assert grid.indices[-1] == n // 2
        assert 0 in grid.indices
        assert grid.indices[grid.zero_position] == 0
        np.testing.assert_allclose(grid.frequencies,
                                   2 * np.pi * grid.indices / n)


class TestPeriodogram:
    def test_constant_series(self):
        values = periodogram(np.full(8, 3.0))
        grid = FrequencyGrid(8)
        assert values[grid.zero_position] == pytest.approx(8 * 9.0)
        others = np.delete(values, grid.zero_position)
        np.testing.assert_allclose(others, 0.0, atol=1e-12)

    def test_unit_impulse_is_flat(self):
        y = np.zeros(16)
        y[0] = 1.0  # impulse at the first time point
        np.testing.assert_allclose(periodogram(y), 1.0 / 16, atol=1e-15)

    def test_parseval(self):
        rng = np.random.default_rng(2)
        y = rng.normal(size=16)
        assert periodogram(y).sum() == pytest.approx(np.sum(y ** 2),
                                                     abs=1e-10)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            periodogram(np.array([]))


class TestModulatedResidualPeriodogram:
    def test_zero_residuals(self):
        n = 32
        m = np.column_stack([np.ones(n), np.arange(1, n + 1) / n])
        beta = np.array([2.0, -1.0])
        series = ObservedSeries.complete(m @ beta)
        out = modulated_residual_periodogram(series, m, beta)
        np.testing.assert_allclose(out, 0.0, atol=1e-20)

    def test_complete_mask_reduces_to_plain_periodogram(self):
        rng = np.random.default_rng(3)
        n = 32
        m = np.column_stack([np.ones(n), rng.normal(size=n)])
        beta = np.array([1.0, 0.5])
        x = rng.normal(size=n)
        series = ObservedSeries.complete(x)
        np.testing.assert_allclose(
            modulated_residual_periodogram(series, m, beta),
            periodogram(x - m @ beta), atol=1e-12)

    def test_matches_zero_filled_dft_oracle(self):
        rng = np.random.default_rng(4)
        n = 32
        mask = rng.random(n) > 0.3
        mask[:2] = True
        x = rng.normal(size=n)
        m = np.column_stack([np.ones(n), rng.normal(size=n)])
        beta = np.array([0.3, -0.7])
        series = ObservedSeries(x, mask)

        resid = np.where(mask, x - m @ beta, 0.0)
        t = np.arange(1, n + 1)
        oracle = np.empty(n)
        for idx, j in enumerate(FrequencyGrid(n).indices):
            z = np.sum(resid * np.exp(-2j * np.pi * j * t / n))
            oracle[idx] = np.abs(z) ** 2 / n
        got = modulated_residual_periodogram(series, m, beta)
        np.testing.assert_allclose(got, oracle, atol=1e-10)

    def test_placeholder_values_ignored(self):
        rng = np.random.default_rng(5)
        n = 24
        mask = rng.random(n) > 0.4
        mask[:2] = True
        x = rng.normal(size=n)
        m = np.ones((n, 1))
        beta = np.array([0.1])
        clean = modulated_residual_periodogram(
            ObservedSeries(x, mask), m, beta)
        poisoned_values = np.where(mask, x, np.nan)
        poisoned = modulated_residual_periodogram(
            ObservedSeries(poisoned_values, mask), m, beta)
        np.testing.assert_array_equal(clean, poisoned)

    def test_dimension_mismatch(self):
        series = ObservedSeries.complete(np.zeros(8))
        with pytest.raises(ValueError):
            modulated_residual_periodogram(series, np.ones((7, 1)), [1.0])
        with pytest.raises(ValueError):
            modulated_residual_periodogram(series, np.ones((8, 2)), [1.0])


class TestModulatedAcv:
    def test_complete_mask_gives_taper(self):
        c = acv_sequence(MATERN, 10)
        got = modulated_acv(c, np.ones(10))
        np.testing.assert_allclose(got, taper_acv(c), atol=1e-12)

    def test_empty_mask_gives_zero(self):
        c = acv_sequence(MATERN, 6)
        np.testing.assert_allclose(modulated_acv(c, np.zeros(6)), 0.0)

    def test_alternating_mask_pair_counts(self):
        c = acv_sequence(MATERN, 8)
        g = np.array([1, 0, 1, 0, 1, 0, 1, 0])
        got = modulated_acv(c, g)
        assert got[1] == 0.0
        assert got[2] == pytest.approx(c[2] * 3.0 / 8.0, abs=1e-14)
        assert got[0] == pytest.approx(c[0] * 4.0 / 8.0, abs=1e-14)

    def test_nonbinary_mask_rejected(self):
        with pytest.raises(MaskError):
            mask_pair_counts(np.array([1.0, 0.5, 0.0]))


class TestExpectedPeriodogram:
    def test_pure_nugget_is_flat(self):
        c = np.zeros(16)
        c[0] = 0.7
        got = expected_periodogram_complete(c)
        np.testing.assert_allclose(got, 0.7, atol=1e-12)

    def test_complete_double_sum_oracle(self):
        n = 16
        c = acv_sequence(MATERN, n)
        got = expected_periodogram_complete(c)
        oracle = double_sum_oracle(c, np.ones(n), n)
        np.testing.assert_allclose(got, oracle, atol=1e-10)

    def test_masked_double_sum_oracle(self):
        rng = np.random.default_rng(6)
        n = 16
        g = (rng.random(n) > 0.3).astype(float)
        g[:2] = 1.0
        c = acv_sequence(MATERN, n)
        got = expected_periodogram_modulated(c, g)
        oracle = double_sum_oracle(c, g, n)
        np.testing.assert_allclose(got, oracle, atol=1e-10)

    def test_trace_identity(self):
        rng = np.random.default_rng(7)
        n = 64
        g = (rng.random(n) > 0.25).astype(float)
        g[:2] = 1.0
        c = acv_sequence(MATERN, n)
        ctilde = modulated_acv(c, g)
        f = expected_periodogram(ctilde)
        assert f.sum() == pytest.approx(n * ctilde[0], abs=1e-8)

    def test_materially_negative_input_rejected(self):
        bad = np.zeros(8)
        bad[1] = 1.0  # not a valid autocovariance: spectrum dips negative
        with pytest.raises(SpectrumDomainError):
            expected_periodogram(bad)

    def test_monte_carlo_consistency(self):
        # average of many simulated periodograms matches the expectation
        n, reps = 128, 20_000
        rng = np.random.default_rng(8)
        expected = expected_periodogram_complete(acv_sequence(MATERN, n))
        acc = np.zeros(n)
        acc_sq = np.zeros(n)
        for _ in range(reps):
            p = periodogram(simulate_gaussian_process(MATERN, n, rng))
            acc += p
            acc_sq += p ** 2
        mean = acc / reps
        se = np.sqrt((acc_sq / reps - mean ** 2) / reps)
        assert np.all(np.abs(mean - expected) <= 3.0 * se)


class TestObservedSeries:
    def test_validation(self):
        with pytest.raises(MaskError):
            ObservedSeries(np.ones(3), np.array([True, False, False]))
        with pytest.raises(MaskError):
            ObservedSeries(np.ones(3), np.array([True, True]))
        with pytest.raises(MaskError):
            ObservedSeries(np.array([np.nan, 1.0, 2.0]),
                           np.array([True, True, True]))

    def test_placeholders_may_be_anything(self):
        s = ObservedSeries(np.array([np.nan, 1.0, 2.0]),
                           np.array([False, True, True]))
        assert s.n_observed == 2
        np.testing.assert_array_equal(s.masked_values(), [0.0, 1.0, 2.0])
        assert s.missing_fraction == pytest.approx(1 / 3)

    def test_arrays_read_only(self):
        s = ObservedSeries.complete(np.array([1.0, 2.0]))
        with pytest.raises(ValueError):
            s.values[0] = 9.0
