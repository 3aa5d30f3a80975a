"""End-to-end experiments: Monte Carlo error statistics and the two
figure reproductions (error periodogram, eigen-spectra with crossover).

Trial ``i`` always uses seed ``base_seed + i`` and results are collected
by trial index, so running trials in parallel does not change them.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np

from fracq import __version__
from fracq.analytics import (
    SpectrumEstimate,
    correlation_report,
    periodogram,
    uniformity_test,
)
from fracq.eigen import (
    PIPELINE_FIT_MIN,
    Crossover,
    EigenSpectrum,
    crossover_detect,
    eigen_spectrum,
    hurst_from_slope,
)
from fracq.errors import OutOfRegimeError
from fracq.quantization import (
    QuantizerSpec,
    high_resolution_spec,
    quantize,
    sigma_delta_error,
)
from fracq.synthesis import synthesize

SCHEMA = "fracq/1"

VARIANCE_TARGET = 1.0 / 12.0
VARIANCE_TOL = 0.004
WHITENESS_BAND = 5.0  # times 1/sqrt(N)
CROSS_CORR_TOL = 0.02
FIG1_SLOPE_TOL = 0.15
FIG2_PATH_SLOPE_TOL = 0.3
FIG2_ERROR_SLOPE_TOL = 0.2
CROSSOVER_RATIO = 2.0


def provenance(command: str, config: dict) -> dict:
    return {"schema": SCHEMA, "tool": "fracq", "version": __version__,
            "command": command, "config": dict(config)}


def run_trials(fn, seeds, jobs: int = 1) -> list:
    """Map ``fn`` over ``seeds``, keeping results in seed order."""
    seeds = list(seeds)
    if jobs <= 1 or len(seeds) <= 1:
        return [fn(s) for s in seeds]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, seeds))


def series_checks(e, signal=None, max_lag: int = 50) -> dict:
    """Per-series statistics behind the uniform/white/uncorrelated claims."""
    e = np.asarray(e, dtype=np.float64)
    n = e.size
    unif = uniformity_test(e)
    corr = correlation_report(e, signal, max_lag)
    max_rho = corr.max_abs_autocorr()
    out = {
        "variance": unif.sample_variance,
        "variance_ok": abs(unif.sample_variance - VARIANCE_TARGET) <= VARIANCE_TOL,
        "autocov0": float(corr.autocov[0]),
        "ks_statistic": unif.ks_statistic,
        "ks_ok": unif.passed,
        "max_abs_autocorr": max_rho,
        "white_ok": max_rho <= WHITENESS_BAND / np.sqrt(n),
    }
    if signal is not None:
        out["cross_corr"] = corr.cross_corr_with_signal
        out["uncorrelated_ok"] = abs(corr.cross_corr_with_signal) <= CROSS_CORR_TOL
    return out


def hires_trial(seed: int, kind: str, H: float, n: int, ratio: float = 1 / 16,
                max_lag: int = 50, method: str = "fft") -> dict:
    """Quantize one synthetic path at high resolution and check both errors."""
    path = synthesize(kind, H, n, seed, method)
    spec = high_resolution_spec(path, ratio)
    _, raw = quantize(path, spec)
    sd = sigma_delta_error(path, spec.delta)
    return {
        "seed": seed,
        "delta": spec.delta,
        "levels": spec.M,
        "saturation_count": raw.saturation_count,
        "raw": series_checks(raw.values, path.values, max_lag),
        "sigma_delta": series_checks(sd.values, path.values, max_lag),
    }


def quantize_step(path, delta: float):
    """Quantize with step exactly ``delta`` and a range covering the path."""
    spec = QuantizerSpec.from_step(delta, float(np.max(np.abs(path.values))))
    q, raw = quantize(path, spec)
    return spec, q, raw


@dataclass(frozen=True)
class Fig1Result:
    spectrum: SpectrumEstimate
    slopes: list
    median_slope: float
    passed: bool
    config: dict

    def report(self) -> dict:
        return {
            **provenance("reproduce-fig1", self.config),
            "spectrum": self.spectrum.to_dict(),
            "slopes": self.slopes,
            "median_slope": self.median_slope,
            "target": 0.0,
            "tolerance": FIG1_SLOPE_TOL,
            "pass": self.passed,
        }


def _fig1_trial(seed, n, H, delta, error, method):
    path = synthesize("fbm", H, n, seed, method)
    spec, _, raw = quantize_step(path, delta)
    e = raw.values if error == "raw" else sigma_delta_error(path, spec.delta).values
    return periodogram(e)


def reproduce_fig1(seed: int = 0, n: int = 2**14, trials: int = 1, H: float = 0.2,
                   delta: float = 1.0, error: str = "raw", method: str = "direct",
                   jobs: int = 1) -> Fig1Result:
    """Periodogram of the quantization error of fBm (default ``H = 0.2``, step 1)."""
    config = {"seed": seed, "n": n, "trials": trials, "hurst": H, "delta": delta,
              "error": error, "method": method, "window": "rectangular",
              "segments": 1, "k_lo": 2, "k_hi": n // 2,
              "seeds": [seed + i for i in range(trials)]}
    fn = partial(_fig1_trial, n=n, H=H, delta=delta, error=error, method=method)
    spectra = run_trials(fn, config["seeds"], jobs)
    slopes = [s.slope_loglog for s in spectra]
    median = float(np.median(slopes))
    return Fig1Result(spectra[0], slopes, median, abs(median) <= FIG1_SLOPE_TOL, config)


@dataclass(frozen=True)
class Fig2Trial:
    seed: int
    path: EigenSpectrum
    quantized: EigenSpectrum
    error: EigenSpectrum
    crossover: Crossover

    def summary(self) -> dict:
        try:
            hurst = hurst_from_slope(self.path.slope)
        except OutOfRegimeError:
            hurst = None
        return {
            "seed": self.seed,
            "slope_path": self.path.slope,
            "slope_quantized": self.quantized.slope,
            "slope_error": self.error.slope,
            "hurst_estimate": hurst,
            "crossover": self.crossover.to_dict(),
        }


def _fig2_trial(seed, n, K, H, delta, method):
    path = synthesize("fbm", H, n, seed, method)
    _, q, raw = quantize_step(path, delta)
    a = eigen_spectrum(path.values, K)
    b = eigen_spectrum(q.values, K)
    c = eigen_spectrum(raw.values, K)
    return Fig2Trial(seed, a, b, c, crossover_detect(b))


@dataclass(frozen=True)
class Fig2Result:
    trials: list
    config: dict

    @property
    def median_path_slope(self) -> float:
        return float(np.median([t.path.slope for t in self.trials]))

    @property
    def median_error_slope(self) -> float:
        return float(np.median([t.error.slope for t in self.trials]))

    @property
    def crossover_count(self) -> int:
        return sum(t.crossover.sse_ratio >= CROSSOVER_RATIO for t in self.trials)

    @property
    def checks(self) -> dict:
        target = -(2 * self.config["hurst"] + 1)
        return {
            "path_slope_ok": abs(self.median_path_slope - target) <= FIG2_PATH_SLOPE_TOL,
            "error_slope_ok": abs(self.median_error_slope) <= FIG2_ERROR_SLOPE_TOL,
            "crossover_ok": self.crossover_count >= 0.7 * len(self.trials),
        }

    def report(self) -> dict:
        checks = self.checks
        return {
            **provenance("reproduce-fig2", self.config),
            "trials": [t.summary() for t in self.trials],
            "median_slope_path": self.median_path_slope,
            "median_slope_error": self.median_error_slope,
            "target_slope_path": -(2 * self.config["hurst"] + 1),
            "crossover_count": self.crossover_count,
            "checks": checks,
            "pass": all(checks.values()),
        }


def reproduce_fig2(seed: int = 0, n: int = 2**16, K: int = 64, trials: int = 1,
                   H: float = 0.8, delta: float = 1.0, method: str = "direct",
                   jobs: int = 1) -> Fig2Result:
    """Eigen-spectra of fBm, its quantized version and the quantization error."""
    config = {"seed": seed, "n": n, "window": K, "windows": n // K, "trials": trials,
              "hurst": H, "delta": delta, "method": method, "fit_min": PIPELINE_FIT_MIN,
              "fit_max": K // 2, "seeds": [seed + i for i in range(trials)]}
    fn = partial(_fig2_trial, n=n, K=K, H=H, delta=delta, method=method)
    return Fig2Result(run_trials(fn, config["seeds"], jobs), config)
