import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from fracq import DomainError, correlation_report, periodogram, uniformity_test
from fracq.analytics import autocovariance, ks_uniform, loglog_slope, pearson


def fft_autocov(x, max_lag):
    c = x - x.mean()
    n = c.size
    f = np.fft.rfft(c, 2 * n)
    return np.fft.irfft(f * np.conj(f), 2 * n)[: max_lag + 1] / n


def test_ks_exact_grid():
    n = 1000
    e = -0.5 + (np.arange(n) + 0.5) / n
    res = uniformity_test(e)
    assert res.ks_statistic == pytest.approx(0.5 / n, rel=1e-9)
    assert res.passed


def test_ks_constant_fails():
    res = uniformity_test(np.zeros(500))
    assert res.ks_statistic == pytest.approx(0.5)
    assert not res.passed


@given(seed=st.integers(0, 10_000), n=st.integers(100, 3000), shift=st.floats(-0.3, 0.3))
@settings(max_examples=50, deadline=None)
def test_ks_matches_scipy(seed, n, shift):
    e = np.random.default_rng(seed).uniform(-0.5, 0.5, n) + shift
    ref = stats.kstest(e, stats.uniform(loc=-0.5, scale=1.0).cdf).statistic
    assert ks_uniform(e) == pytest.approx(ref, abs=1e-12)


def test_ks_threshold_and_domain():
    res = uniformity_test(np.linspace(-0.5, 0.5, 400))
    assert res.threshold == pytest.approx(1.63 / 20)
    with pytest.raises(DomainError):
        uniformity_test(np.zeros(99))


def test_uniform_self_calibration():
    e = np.random.default_rng(2024).uniform(-0.5, 0.5, 100_000)
    assert uniformity_test(e).passed
    rep = correlation_report(e, None, 50)
    assert abs(rep.autocov[0] - 1 / 12) <= 0.004
    assert rep.max_abs_autocorr() <= 5 / math.sqrt(e.size)
    assert abs(periodogram(e[: 2**14]).slope_loglog) <= 0.1


@pytest.mark.parametrize("seed", range(3))
def test_autocov_matches_fft(seed):
    x = np.random.default_rng(seed).standard_normal(5000).cumsum()
    np.testing.assert_allclose(autocovariance(x, 200), fft_autocov(x, 200), rtol=1e-9,
                               atol=1e-9 * fft_autocov(x, 0)[0])


def test_correlation_report_invariants():
    x = np.random.default_rng(5).standard_normal(2000)
    y = 0.3 * x + np.random.default_rng(6).standard_normal(2000)
    rep = correlation_report(x, y, 100)
    assert rep.autocorr[0] == 1.0
    assert np.all(np.abs(rep.autocorr) <= 1.0)
    np.testing.assert_array_equal(rep.lags, np.arange(101))
    assert rep.cross_corr_with_signal == pytest.approx(np.corrcoef(x, y)[0, 1], abs=1e-12)
    assert rep.n_samples == 2000
    d = rep.to_dict()
    assert len(d["autocov"]) == 101 and d["cross_corr_with_signal"] is not None


def test_correlation_report_domain():
    x = np.random.default_rng(0).standard_normal(100)
    correlation_report(x, None, 10)
    with pytest.raises(DomainError):
        correlation_report(x, None, 11)
    with pytest.raises(DomainError):
        correlation_report(np.ones(100), None, 5)
    with pytest.raises(DomainError):
        pearson(x, x[:50])


def test_periodogram_cosine():
    n, k0 = 1024, 37
    x = np.cos(2 * np.pi * k0 * np.arange(n) / n)
    s = periodogram(x)
    peak = s.power[k0 - 1]
    assert peak == pytest.approx(n / 4, rel=1e-12)
    others = np.delete(s.power, k0 - 1)
    assert np.max(others) <= 1e-9 * peak
    np.testing.assert_allclose(s.frequencies, np.arange(1, n // 2 + 1) / n)


@given(seed=st.integers(0, 10_000), n=st.integers(64, 4096), scale=st.floats(1e-3, 1e3))
@settings(max_examples=40, deadline=None)
def test_periodogram_parseval(seed, n, scale):
    x = scale * np.random.default_rng(seed).standard_normal(n) + 7.0
    s = periodogram(x)
    assert s.parseval_error <= 1e-9
    assert np.all(s.power >= 0)
    # periodogram is invariant to the mean
    np.testing.assert_allclose(periodogram(x - 7.0).power, s.power, rtol=1e-6,
                               atol=1e-9 * scale**2)


def test_white_noise_slope():
    slopes = [periodogram(np.random.default_rng(s).standard_normal(2**14)).slope_loglog
              for s in range(20)]
    assert abs(np.mean(slopes)) <= 0.1


def test_random_walk_slope():
    # 1/f^2 spectrum of a random walk
    x = np.random.default_rng(1).standard_normal(2**14).cumsum()
    assert periodogram(x, k_hi=512).slope_loglog == pytest.approx(-2.0, abs=0.2)


def test_welch_segments():
    x = np.random.default_rng(3).standard_normal(4096)
    s = periodogram(x, segments=4)
    assert s.power.size == 512 and s.segments == 4
    blocks = x.reshape(4, 1024)
    blocks = blocks - blocks.mean(axis=1, keepdims=True)
    ref = (np.abs(np.fft.fft(blocks, axis=1)) ** 2 / 1024).mean(axis=0)[1:513]
    np.testing.assert_allclose(s.power, ref, rtol=1e-12)


def test_periodogram_domain():
    with pytest.raises(DomainError):
        periodogram(np.random.default_rng(0).standard_normal(63))
    with pytest.raises(DomainError):
        periodogram(np.random.default_rng(0).standard_normal(128), k_lo=10, k_hi=5)
    with pytest.raises(DomainError):
        periodogram(np.ones(128))


def test_loglog_slope_exact():
    x = np.arange(1, 100, dtype=float)
    assert loglog_slope(x, 3 * x**-1.7) == pytest.approx(-1.7, abs=1e-12)
