"""Sample-free characteristic function of the running fractional part.

For a path driven by i.i.d. N(0, 1) innovations with cumulative
coefficients ``c_i``, the characteristic function of ``frac(theta(n))``
at ``2 pi l`` has magnitude

    prod_{i<=n} exp(-1/2 (2 pi l / delta)**2 c_i**2),

so its logarithm is ``-1/2 (2 pi l / delta)**2 * sum_{i<=n} c_i**2``.
It tends to 0 for every ``l != 0`` exactly when the fractional part
becomes uniform.  Everything here is computed in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from fracq.errors import DomainError
from fracq.weights import WeightSequence, weights

# Magnitudes below this are reported through their logarithm only.
LOG_FLOOR = math.log(1e-300)
DEFAULT_L_BOUND = 8
DEFAULT_THRESHOLD = 1e-6
DEFAULT_NMAX = 10_000


def cumulative_coeffs(H: float, nmax: int, kind: str) -> WeightSequence:
    """Coefficients multiplying the innovations in ``theta(n)``.

    fGn: running sums of the fGn weights, ``weights(H + 1/2)``.
    fBm: double running sums, ``weights(H + 3/2)``, i.e.
    ``sum_j (r - j + 1) w_j(H - 1/2)``.
    """
    if not 0.0 < H < 1.0:
        raise DomainError(f"Hurst exponent H={H} outside (0, 1)")
    if kind == "fgn":
        return weights(H + 0.5, nmax)
    if kind == "fbm":
        return weights(H + 1.5, nmax)
    raise DomainError(f"kind must be 'fgn' or 'fbm', got {kind!r}")


@dataclass(frozen=True)
class CFProfile:
    """``|Phi_n(2 pi l)|`` for ``n = 0..nmax``.

    ``magnitudes`` holds NaN wherever the value is below 1e-300; the
    log-magnitudes are always available.
    """

    H: float
    delta: float
    l: int
    kind: str
    log_magnitudes: np.ndarray
    threshold: float = DEFAULT_THRESHOLD
    magnitudes: np.ndarray = field(init=False)

    def __post_init__(self):
        logm = np.asarray(self.log_magnitudes, dtype=np.float64)
        logm.flags.writeable = False
        mags = np.full(logm.shape, np.nan)
        ok = logm >= LOG_FLOOR
        mags[ok] = np.exp(logm[ok])
        mags.flags.writeable = False
        object.__setattr__(self, "log_magnitudes", logm)
        object.__setattr__(self, "magnitudes", mags)

    @property
    def nmax(self) -> int:
        return self.log_magnitudes.size - 1

    @property
    def monotone(self) -> bool:
        return bool(np.all(np.diff(self.log_magnitudes) <= 0))

    def first_below(self, threshold: float | None = None) -> int | None:
        threshold = self.threshold if threshold is None else threshold
        hits = np.flatnonzero(self.log_magnitudes < math.log(threshold))
        return int(hits[0]) if hits.size else None


def cf_magnitude_profile(H: float, delta: float, l: int, nmax: int, kind: str,
                         threshold: float = DEFAULT_THRESHOLD,
                         l_bound: int = DEFAULT_L_BOUND) -> CFProfile:
    """Log-magnitude profile of the characteristic function at ``2 pi l``."""
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    if int(l) != l or abs(l) > l_bound:
        raise DomainError(f"harmonic l={l} must be an integer with |l| <= {l_bound}")
    if nmax < 1:
        raise DomainError(f"nmax must be >= 1, got {nmax}")
    c = cumulative_coeffs(H, nmax, kind).values
    # fold the factor so that delta -> k*delta scales the result by exactly 1/k**2
    rate = 2.0 * math.pi**2 * float(l) ** 2
    energy = np.cumsum(c * c)
    logm = -(rate * energy) / (delta * delta)
    if l == 0:
        logm = np.zeros_like(energy)
    return CFProfile(H, float(delta), int(l), kind, logm, threshold)


@dataclass(frozen=True)
class DichotomyEntry:
    l: int
    passed: bool
    monotone: bool
    final_log_magnitude: float
    first_below: int | None

    def to_dict(self) -> dict:
        return {
            "l": self.l,
            "pass": self.passed,
            "monotone": self.monotone,
            "final_log_magnitude": self.final_log_magnitude,
            "first_below": self.first_below,
        }


def verify_limit_dichotomy(H: float, delta: float, l_set, nmax: int = DEFAULT_NMAX,
                           kind: str = "fgn",
                           threshold: float = DEFAULT_THRESHOLD) -> list[DichotomyEntry]:
    """Check ``|Phi_n(2 pi l)| -> 1{l = 0}`` on ``0..nmax`` for each ``l``.

    ``l != 0`` passes when the profile is monotone and ends below
    ``threshold``; ``l = 0`` passes when the profile is identically one.
    """
    if not 0.0 < threshold < 1.0:
        raise DomainError(f"threshold must lie in (0, 1), got {threshold}")
    report = []
    for l in l_set:
        prof = cf_magnitude_profile(H, delta, l, nmax, kind, threshold)
        final = float(prof.log_magnitudes[-1])
        if l == 0:
            passed = bool(np.all(prof.magnitudes == 1.0))
        else:
            passed = prof.monotone and final < math.log(threshold)
        report.append(DichotomyEntry(int(l), passed, prof.monotone, final,
                                     prof.first_below(threshold)))
    return report
