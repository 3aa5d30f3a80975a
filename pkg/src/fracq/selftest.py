"""Fast end-to-end checks behind ``fracq selftest``.

A reduced version of the acceptance suite: fewer seeds, same tolerances.
Each check prints one PASS/FAIL line.
"""

from __future__ import annotations

import math

import numpy as np

from fracq.analytics import correlation_report, periodogram, uniformity_test
from fracq.cf import cf_magnitude_profile, verify_limit_dichotomy
from fracq.eigen import eigenvalues_symmetric, fit_power_law
from fracq.experiments import hires_trial, reproduce_fig1
from fracq.synthesis import causal_filter, fbm, fgn, white_values
from fracq.weights import partial_sums, weights


def _lgamma_weight(d: float, n: int) -> float:
    # For -1/2 < d < 0 only Gamma(d) is negative, and it cancels at n = 0.
    sign = -1.0 if d < 0 and n > 0 else 1.0
    return sign * math.exp(math.lgamma(n + d) - math.lgamma(d) - math.lgamma(n + 1))


def _checks(quick: bool):
    n_seeds = 3 if quick else 10

    def hockey_stick():
        worst = 0.0
        for d in (-0.3, -0.1, 0.3, 0.49):
            lhs = partial_sums(weights(d, 10_000)).values
            rhs = weights(d + 1, 10_000).values
            worst = max(worst, float(np.max(np.abs(lhs - rhs) / np.abs(rhs))))
        return worst <= 1e-12, f"max rel diff {worst:.2e}"

    def lgamma_oracle():
        worst = 0.0
        for d in (-0.3, 0.3, 1.3):
            w = weights(d, 1000).values
            ref = np.array([_lgamma_weight(d, n) for n in range(1001)])
            worst = max(worst, float(np.max(np.abs(w - ref) / np.abs(ref))))
        return worst <= 1e-10, f"max rel diff {worst:.2e}"

    def cf_dichotomy():
        ok = True
        for H in (0.2, 0.3, 0.5, 0.8):
            for kind in ("fgn", "fbm"):
                ok &= all(e.passed for e in verify_limit_dichotomy(H, 1.0, (0, 1, 2, 3), 10_000, kind))
        prof = cf_magnitude_profile(0.5, 1.0, 2, 1000, "fgn")
        closed = -2 * math.pi**2 * 4 * np.arange(1, 1002)
        rel = float(np.max(np.abs(prof.log_magnitudes - closed) / np.abs(closed)))
        return ok and rel <= 1e-12, f"closed-form rel diff {rel:.2e}"

    def synthesis_routes():
        worst = 0.0
        for H in (0.2, 0.5, 0.8):
            for seed in range(n_seeds):
                a = fbm(H, 2048, seed).values
                b = causal_filter(white_values(2048, seed), weights(H + 0.5, 2047).values)
                worst = max(worst, float(np.max(np.abs(a - b))))
                diff = np.max(np.abs(np.diff(a) - fgn(H, 2048, seed).values[1:]))
                worst = max(worst, float(diff))
        return worst <= 1e-9, f"max abs diff {worst:.2e}"

    def hires_errors():
        ok, count = True, 0
        for kind in ("fgn", "fbm"):
            for H in (0.2, 0.5, 0.8):
                for seed in range(n_seeds):
                    res = hires_trial(seed, kind, H, 100_000)
                    for src in ("raw", "sigma_delta"):
                        r = res[src]
                        ok &= r["variance_ok"] and r["ks_ok"] and r["white_ok"] and r["uncorrelated_ok"]
                        count += 1
        return ok, f"{count} error series"

    def uniform_calibration():
        rng = np.random.default_rng(12345)
        e = rng.uniform(-0.5, 0.5, 100_000)
        unif = uniformity_test(e)
        corr = correlation_report(e, None, 50)
        slope = periodogram(e[: 2**14]).slope_loglog
        ok = (unif.passed and abs(corr.autocov[0] - 1 / 12) <= 0.004
              and corr.max_abs_autocorr() <= 5 / math.sqrt(e.size) and abs(slope) <= 0.15)
        return ok, f"D={unif.ks_statistic:.4f} R0={corr.autocov[0]:.5f} slope={slope:+.3f}"

    def fig1():
        res = reproduce_fig1(0, 2**14, trials=n_seeds)
        return res.passed, f"median slope {res.median_slope:+.4f}"

    def eigensolver():
        lam = eigenvalues_symmetric([[2.0, 1.0], [1.0, 2.0]])
        slope = fit_power_law(np.arange(1, 65, dtype=float) ** -2.6, 2, 32)
        ok = np.allclose(lam, [3.0, 1.0], rtol=1e-14) and abs(slope + 2.6) <= 1e-12
        return ok, f"eigs {lam.tolist()}, slope {slope:.12f}"

    return [
        ("weights: hockey-stick identity", hockey_stick),
        ("weights: recurrence vs log-gamma", lgamma_oracle),
        ("cf: limit dichotomy and closed form", cf_dichotomy),
        ("synthesis: running sum vs partial-sum filter", synthesis_routes),
        ("quantization: high-resolution error statistics", hires_errors),
        ("analytics: uniform self-calibration", uniform_calibration),
        ("reproduce-fig1: error periodogram slope", fig1),
        ("eigen: solver and power-law fit", eigensolver),
    ]


def run_selftest(quick: bool = False) -> bool:
    all_ok = True
    for name, check in _checks(quick):
        ok, detail = check()
        all_ok &= bool(ok)
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return all_ok
