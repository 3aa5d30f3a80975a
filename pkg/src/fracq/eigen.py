"""PCA eigen-spectrum of a windowed auto-correlation matrix.

A path is cut into ``L`` non-overlapping windows of length ``K``; the
``K x K`` matrix ``(1/L) sum_w x_w x_w^T`` (no mean removal) is
diagonalized, and the sorted eigenvalues are fitted with a power law
``lambda_k ~ k**slope``.  For fBm the slope is about ``-(2H + 1)``; for
white noise it is near zero, and white noise added to fBm produces a
crossover between the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from fracq.errors import DomainError, OutOfRegimeError

SYMMETRY_RTOL = 1e-10
OFFDIAG_RTOL = 1e-12
NEGATIVE_FLOOR = 1e-10
MIN_CROSSOVER_K = 16
# Each crossover segment keeps at least this many points.
CROSSOVER_MARGIN = 4


@dataclass(frozen=True)
class EigenSpectrum:
    """Descending eigenvalues of a ``K x K`` auto-correlation matrix."""

    eigenvalues: np.ndarray
    K: int
    L: int
    slope: float | None = None
    fit_range: tuple[int, int] | None = None
    trace: float | None = None

    def __post_init__(self):
        lam = np.array(self.eigenvalues, dtype=np.float64)
        if lam.ndim != 1 or lam.size != self.K:
            raise DomainError(f"expected {self.K} eigenvalues, got shape {lam.shape}")
        if np.any(np.diff(lam) > 0):
            raise DomainError("eigenvalues must be sorted in descending order")
        if lam.size and lam[-1] < -NEGATIVE_FLOOR * max(abs(lam[0]), 1e-300):
            raise DomainError(f"eigenvalue {lam[-1]} below the numerical floor")
        lam.flags.writeable = False
        object.__setattr__(self, "eigenvalues", lam)

    @property
    def k(self) -> np.ndarray:
        return np.arange(1, self.K + 1)


def covariance_matrix(x, K: int) -> np.ndarray:
    """Window-averaged auto-correlation matrix of ``x``.

    Entry ``(i, j)`` is ``(1/L) sum_w x_w(i) x_w(j)`` over the
    ``L = len(x) // K`` non-overlapping windows; trailing samples are
    dropped.  Requires ``len(x) >= 4 K``.
    """
    x = np.asarray(x, dtype=np.float64)
    K = int(K)
    if K < 1:
        raise DomainError(f"window length must be >= 1, got {K}")
    if x.size < 4 * K:
        raise DomainError(f"need at least 4K={4 * K} samples, got {x.size}")
    L = x.size // K
    windows = x[: L * K].reshape(L, K)
    c = windows.T @ windows / L
    return (c + c.T) / 2.0


def _check_symmetric(a: np.ndarray) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    scale = np.max(np.abs(a)) if a.size else 0.0
    if np.max(np.abs(a - a.T), initial=0.0) > SYMMETRY_RTOL * scale:
        raise DomainError("matrix is not symmetric within tolerance")


def jacobi_eigenvalues(a, tol: float = OFFDIAG_RTOL, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps continue until the Frobenius norm of the off-diagonal part is at
    most ``tol`` times the norm of the whole matrix.  Returns the diagonal
    in its final (unsorted) order.
    """
    a = np.array(a, dtype=np.float64)
    n = a.shape[0]
    norm = math.sqrt(float(np.sum(a * a)))
    if n < 2 or norm == 0.0:
        return np.diag(a).copy()

    upper = np.triu_indices(n, 1)
    for _ in range(max_sweeps):
        off = math.sqrt(2.0 * float(np.sum(a[upper] ** 2)))
        if off <= tol * norm:
            return np.diag(a).copy()
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app, aqq = a[p, p], a[q, q]
                g = 100.0 * abs(apq)
                if abs(app) + g == abs(app) and abs(aqq) + g == abs(aqq):
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (aqq - app) / (2.0 * apq)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                row_p = a[p, :].copy()
                a[p, :] = c * row_p - s * a[q, :]
                a[q, :] = s * row_p + c * a[q, :]
                col_p = a[:, p].copy()
                a[:, p] = c * col_p - s * a[:, q]
                a[:, q] = s * col_p + c * a[:, q]

                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = a[q, p] = 0.0
    raise DomainError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def eigenvalues_symmetric(matrix) -> np.ndarray:
    """Full real spectrum of a symmetric matrix, sorted descending."""
    a = np.asarray(matrix, dtype=np.float64)
    _check_symmetric(a)
    a = (a + a.T) / 2.0
    return np.sort(jacobi_eigenvalues(a))[::-1]


def _positive_range(lam: np.ndarray, k_min: int, k_max: int) -> np.ndarray:
    chunk = lam[k_min - 1 : k_max]
    bad = np.flatnonzero(chunk <= 0)
    if bad.size:
        k = int(bad[0]) + k_min
        raise DomainError(f"nonpositive eigenvalue {chunk[bad[0]]} at k={k}")
    return chunk


def fit_power_law(spec, k_min: int = 2, k_max: int | None = None) -> float:
    """OLS slope of ``log lambda_k`` on ``log k`` for ``k_min <= k <= k_max``.

    ``spec`` is an :class:`EigenSpectrum` or a descending eigenvalue array.
    ``k_max`` defaults to ``K // 2``.
    """
    lam = np.asarray(getattr(spec, "eigenvalues", spec), dtype=np.float64)
    K = lam.size
    k_max = K // 2 if k_max is None else int(k_max)
    if not 1 <= k_min < k_max <= K:
        raise DomainError(f"fit range [{k_min}, {k_max}] invalid for K={K}")
    chunk = _positive_range(lam, k_min, k_max)
    lk = np.log(np.arange(k_min, k_max + 1, dtype=np.float64))
    ll = np.log(chunk)
    lk = lk - lk.mean()
    return float(np.dot(lk, ll - ll.mean()) / np.dot(lk, lk))


def hurst_from_slope(slope: float) -> float:
    """Invert ``lambda_k ~ k**-(2H + 1)``; slopes ``>= -1`` are not fBm-like."""
    if not slope < -1.0:
        raise OutOfRegimeError(f"slope {slope} >= -1 is outside the fBm regime")
    return -(slope + 1.0) / 2.0


# The first few eigenvalues of the windowed matrix carry the window level
# and window-scale drift of a persistent path, not the power law.
PIPELINE_FIT_MIN = 4


def eigen_spectrum(x, K: int = 64, fit_min: int = PIPELINE_FIT_MIN,
                   fit_max: int | None = None) -> EigenSpectrum:
    """Eigen-spectrum of ``covariance_matrix(x, K)`` with its fitted slope.

    The slope is fitted over ``[fit_min, fit_max]``, by default ``[4, K // 2]``.
    """
    c = covariance_matrix(x, K)
    lam = eigenvalues_symmetric(c)
    fit_max = K // 2 if fit_max is None else fit_max
    slope = fit_power_law(lam, fit_min, fit_max)
    L = np.asarray(x).size // K
    return EigenSpectrum(lam, K, L, slope, (fit_min, fit_max), float(np.trace(c)))


@dataclass(frozen=True)
class Crossover:
    breakpoint: int
    slope_left: float
    slope_right: float
    sse_ratio: float
    sse_one: float
    sse_two: float

    @property
    def detected(self) -> bool:
        return self.sse_ratio >= 2.0 and self.slope_left < self.slope_right

    def to_dict(self) -> dict:
        return {
            "breakpoint": self.breakpoint,
            "slope_left": self.slope_left,
            "slope_right": self.slope_right,
            "sse_ratio": self.sse_ratio,
            "sse_one_segment": self.sse_one,
            "sse_two_segment": self.sse_two,
            "detected": self.detected,
        }


def _line_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(np.dot(xc, xc))
    slope = float(np.dot(xc, yc) / sxx)
    resid = yc - slope * xc
    return slope, float(np.dot(resid, resid))


def crossover_detect(spec) -> Crossover:
    """Best two-segment log-log fit of an eigen-spectrum.

    Every breakpoint ``b`` in ``[4, K - 4]`` splits ``k = 1..K`` into
    ``1..b`` and ``b+1..K``, each fitted with its own line.  The breakpoint
    with the smallest total squared error wins; ``sse_ratio`` compares the
    single-line error to that minimum (a tiny floor keeps exact data at
    ratio 1 rather than 0/0).
    """
    lam = np.asarray(getattr(spec, "eigenvalues", spec), dtype=np.float64)
    K = lam.size
    if K < MIN_CROSSOVER_K:
        raise DomainError(f"crossover detection needs K >= {MIN_CROSSOVER_K}, got {K}")
    lx = np.log(np.arange(1, K + 1, dtype=np.float64))
    ly = np.log(_positive_range(lam, 1, K))

    _, sse_one = _line_fit(lx, ly)
    best = None
    for b in range(CROSSOVER_MARGIN, K - CROSSOVER_MARGIN + 1):
        s_left, e_left = _line_fit(lx[:b], ly[:b])
        s_right, e_right = _line_fit(lx[b:], ly[b:])
        total = e_left + e_right
        if best is None or total < best[0]:
            best = (total, b, s_left, s_right)
    sse_two, b, s_left, s_right = best
    floor = 1e-12 * (1.0 + float(np.sum((ly - ly.mean()) ** 2)))
    ratio = (sse_one + floor) / (sse_two + floor)
    return Crossover(b, s_left, s_right, ratio, sse_one, sse_two)
