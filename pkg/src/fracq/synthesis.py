"""Seeded white noise and the discrete-time fGn / fBm constructions.

fGn is the causal, truncated fractional filter applied to standard
Gaussian white noise (``W(i) = 0`` for ``i < 0``, no burn-in); fBm is the
running sum of fGn.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from fracq.errors import DomainError
from fracq.weights import check_length, weights

KINDS = ("white", "fgn", "fbm")


@dataclass(frozen=True)
class SignalPath:
    """A finite real sequence tagged with how it was generated."""

    values: np.ndarray
    kind: str
    H: float | None = None
    seed: int | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size < 1:
            raise DomainError("a signal path needs at least one value")
        if self.kind not in KINDS:
            raise DomainError(f"unknown signal kind {self.kind!r}")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def length(self) -> int:
        return self.values.size

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def _check_length(length: int) -> int:
    length = int(length)
    if length < 1:
        raise DomainError(f"length must be >= 1, got {length}")
    check_length(length)
    return length


def _check_hurst(H: float) -> float:
    H = float(H)
    if not 0.0 < H < 1.0:
        raise DomainError(f"Hurst exponent H={H} outside (0, 1)")
    return H


def white_values(length: int, seed: int) -> np.ndarray:
    # PCG64 draws normals one at a time, so a longer request with the same
    # seed extends a shorter one.
    return np.random.default_rng(seed).standard_normal(length)


def gaussian_white(length: int, seed: int) -> SignalPath:
    """i.i.d. standard normal draws, reproducible per ``(length, seed)``."""
    length = _check_length(length)
    return SignalPath(white_values(length, seed), "white", None, seed)


def causal_filter(x: np.ndarray, h: np.ndarray, method: str = "direct") -> np.ndarray:
    """Truncated causal convolution ``y[n] = sum_{i<=n} h[n-i] x[i]``.

    ``method="direct"`` is the O(n^2) reference; ``method="fft"`` zero-pads
    to avoid wrap-around and is used for long Monte Carlo batches.  ``x``
    may be 2-D with one series per row.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[-1]
    h = np.asarray(h, dtype=np.float64)[:n]
    if method == "direct":
        if x.ndim == 1:
            return np.convolve(x, h)[:n]
        return np.stack([np.convolve(row, h)[:n] for row in x])
    if method == "fft":
        size = 1 << (2 * n - 1).bit_length()
        spectrum = np.fft.rfft(x, size, axis=-1) * np.fft.rfft(h, size)
        return np.fft.irfft(spectrum, size, axis=-1)[..., :n]
    raise DomainError(f"unknown convolution method {method!r}")


def fgn_values(H: float, white: np.ndarray, method: str = "direct") -> np.ndarray:
    white = np.asarray(white, dtype=np.float64)
    if H == 0.5:
        return white.copy()
    w = weights(H - 0.5, white.shape[-1] - 1).values
    return causal_filter(white, w, method)


def fgn(H: float, length: int, seed: int, method: str = "direct") -> SignalPath:
    """Discrete-time fractional Gaussian noise.

    ``values[n] = sum_{i=0}^{n} w_{n-i}(H - 1/2) white[i]`` where ``white``
    is ``gaussian_white(length, seed)``.  For ``H = 1/2`` the white path is
    returned unchanged.

    Parameters
    ----------
    H : float
        Hurst exponent in (0, 1).
    length : int
        Number of samples.
    seed : int
        Seed of the underlying white noise.
    method : {"direct", "fft"}
        Convolution route. Both agree to about 1e-12 absolute.
    """
    H = _check_hurst(H)
    length = _check_length(length)
    values = fgn_values(H, white_values(length, seed), method)
    return SignalPath(values, "fgn", H, seed)


def fbm(H: float, length: int, seed: int, method: str = "direct") -> SignalPath:
    """Discrete-time fractional Brownian motion, the running sum of ``fgn``."""
    H = _check_hurst(H)
    length = _check_length(length)
    values = np.cumsum(fgn_values(H, white_values(length, seed), method))
    return SignalPath(values, "fbm", H, seed)


def synthesize(kind: str, H: float | None, length: int, seed: int,
               method: str = "direct") -> SignalPath:
    if kind == "white":
        return gaussian_white(length, seed)
    if kind == "fgn":
        return fgn(H, length, seed, method)
    if kind == "fbm":
        return fbm(H, length, seed, method)
    raise DomainError(f"unknown signal kind {kind!r}")
