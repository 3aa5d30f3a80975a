"""Statistics of an error series: uniformity, whiteness, spectrum."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from fracq.errors import DomainError

# Asymptotic Kolmogorov quantile at alpha = 0.01.
KS_C_ALPHA = 1.63
MIN_KS_N = 100
MIN_PERIODOGRAM_N = 64


@dataclass(frozen=True)
class UniformityResult:
    ks_statistic: float
    threshold: float
    passed: bool
    sample_mean: float
    sample_variance: float
    n_samples: int

    def to_dict(self) -> dict:
        return {
            "ks_statistic": self.ks_statistic,
            "threshold": self.threshold,
            "pass": self.passed,
            "sample_mean": self.sample_mean,
            "sample_variance": self.sample_variance,
            "n_samples": self.n_samples,
            "alpha": 0.01,
        }


def ks_uniform(e) -> float:
    """Sup distance between the ECDF of ``e`` and the U[-1/2, 1/2] CDF."""
    u = np.sort(np.clip(np.asarray(e, dtype=np.float64) + 0.5, 0.0, 1.0))
    n = u.size
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - u), np.max(u - (i - 1) / n)))


def uniformity_test(e) -> UniformityResult:
    """Kolmogorov-Smirnov check of ``e`` against U[-1/2, 1/2].

    Passes when ``D <= 1.63 / sqrt(N)`` (level 0.01).
    """
    x = np.asarray(e, dtype=np.float64)
    n = x.size
    if n < MIN_KS_N:
        raise DomainError(f"uniformity test needs N >= {MIN_KS_N}, got {n}")
    d = ks_uniform(x)
    threshold = KS_C_ALPHA / math.sqrt(n)
    return UniformityResult(d, threshold, d <= threshold, float(x.mean()),
                            float(x.var(ddof=1)), n)


@dataclass(frozen=True)
class CorrelationReport:
    lags: np.ndarray
    autocov: np.ndarray
    autocorr: np.ndarray
    cross_corr_with_signal: float | None
    n_samples: int

    def max_abs_autocorr(self, k_min: int = 1) -> float:
        return float(np.max(np.abs(self.autocorr[k_min:])))

    def to_dict(self) -> dict:
        return {
            "lags": self.lags.tolist(),
            "autocov": self.autocov.tolist(),
            "autocorr": self.autocorr.tolist(),
            "cross_corr_with_signal": self.cross_corr_with_signal,
            "n_samples": self.n_samples,
            "normalization": "biased_1_over_N",
        }


def autocovariance(x, max_lag: int) -> np.ndarray:
    """Biased sample autocovariance ``(1/N) sum (x_n - m)(x_{n+k} - m)``."""
    x = np.asarray(x, dtype=np.float64)
    c = x - x.mean()
    n = c.size
    return np.array([np.dot(c[: n - k], c[k:]) / n for k in range(max_lag + 1)])


def pearson(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DomainError(f"length mismatch: {a.size} vs {b.size}")
    ac = a - a.mean()
    bc = b - b.mean()
    denom = math.sqrt(float(np.dot(ac, ac)) * float(np.dot(bc, bc)))
    if denom == 0:
        raise DomainError("Pearson correlation undefined for a constant series")
    return float(np.dot(ac, bc) / denom)


def correlation_report(e, signal=None, max_lag: int = 50) -> CorrelationReport:
    """Autocovariance/autocorrelation of ``e`` and its lag-0 correlation with ``signal``."""
    x = np.asarray(e, dtype=np.float64)
    n = x.size
    if max_lag < 0 or max_lag > n / 10:
        raise DomainError(f"max_lag={max_lag} must lie in [0, N/10] with N={n}")
    acov = autocovariance(x, max_lag)
    if acov[0] == 0:
        raise DomainError("autocorrelation undefined for a constant series")
    acorr = acov / acov[0]
    cross = None if signal is None else pearson(x, signal)
    return CorrelationReport(np.arange(max_lag + 1), acov, acorr, cross, n)


@dataclass(frozen=True)
class SpectrumEstimate:
    """Periodogram ordinates at ``f_k = k / N``, ``k = 1 .. N // 2``."""

    frequencies: np.ndarray
    power: np.ndarray
    slope_loglog: float
    k_lo: int
    k_hi: int
    segments: int
    parseval_error: float

    def to_dict(self) -> dict:
        return {
            "slope_loglog": self.slope_loglog,
            "k_lo": self.k_lo,
            "k_hi": self.k_hi,
            "segments": self.segments,
            "window": "rectangular",
            "mean_removed": True,
            "parseval_error": self.parseval_error,
        }


def loglog_slope(x, y) -> float:
    """Ordinary least-squares slope of ``log y`` against ``log x``."""
    lx = np.log(np.asarray(x, dtype=np.float64))
    ly = np.log(np.asarray(y, dtype=np.float64))
    lx = lx - lx.mean()
    return float(np.dot(lx, ly - ly.mean()) / np.dot(lx, lx))


def periodogram(x, k_lo: int = 2, k_hi: int | None = None,
                segments: int = 1) -> SpectrumEstimate:
    """Rectangular-window periodogram ``|X_k|^2 / N`` of the demeaned series.

    With ``segments > 1`` the series is cut into that many equal,
    non-overlapping pieces whose periodograms are averaged (Welch without
    overlap or taper); ``N`` is then the segment length.  The log-log slope
    is fitted over ``k_lo <= k <= k_hi`` (default up to ``N // 2``).
    """
    x = np.asarray(x, dtype=np.float64)
    if segments < 1:
        raise DomainError(f"segments must be >= 1, got {segments}")
    n = x.size // segments
    if n < MIN_PERIODOGRAM_N:
        raise DomainError(f"periodogram needs N >= {MIN_PERIODOGRAM_N}, got {n}")
    blocks = x[: n * segments].reshape(segments, n)
    blocks = blocks - blocks.mean(axis=1, keepdims=True)

    full = np.abs(np.fft.fft(blocks, axis=1)) ** 2 / n
    energy = np.sum(blocks**2, axis=1)
    parseval = float(np.max(np.abs(full.sum(axis=1) - energy) / np.maximum(energy, 1e-300)))

    half = n // 2
    power = full[:, 1 : half + 1].mean(axis=0)
    k = np.arange(1, half + 1)
    k_hi = half if k_hi is None else int(k_hi)
    if not 1 <= k_lo < k_hi <= half:
        raise DomainError(f"fit band [{k_lo}, {k_hi}] outside [1, {half}]")
    band = slice(k_lo - 1, k_hi)
    if np.any(power[band] <= 0):
        raise DomainError("zero periodogram ordinate inside the fit band")
    slope = loglog_slope(k[band], power[band])
    return SpectrumEstimate(k / n, power, slope, k_lo, k_hi, segments, parseval)
