"""Uniform M-level quantizer and normalized quantization errors.

Two error constructions are provided:

* the raw error ``(q(n) - x(n)) / delta`` of the midtread/midrise
  quantizer with reproduction levels ``-b + k * delta``;
* the sigma-delta form ``e(n) = 1/2 - frac(theta(n))`` with
  ``theta(n) = sum_{i<=n} (x(i) / delta + 1/2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from fracq.errors import DomainError
from fracq.synthesis import SignalPath

# Fixed-point resolution for the running fractional part: every double in
# [1/2, 1) is an integer multiple of 2**-53.
_FRAC_BITS = 53
_FRAC_SCALE = float(1 << _FRAC_BITS)
_FRAC_MASK = np.uint64((1 << _FRAC_BITS) - 1)


@dataclass(frozen=True)
class QuantizerSpec:
    """M-level uniform quantizer over ``[-b, b]`` with step ``2b/(M-1)``."""

    b: float
    M: int

    def __post_init__(self):
        if not (math.isfinite(self.b) and self.b > 0):
            raise DomainError(f"half-range b must be positive and finite, got {self.b}")
        if int(self.M) != self.M or self.M < 2:
            raise DomainError(f"level count M must be an integer >= 2, got {self.M}")
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "M", int(self.M))

    @property
    def delta(self) -> float:
        return 2.0 * self.b / (self.M - 1)

    @classmethod
    def from_step(cls, delta: float, b_min: float) -> "QuantizerSpec":
        """Odd-level quantizer with step exactly ``delta`` covering ``b_min``.

        The half-range is rounded up to a whole number of steps, so the
        levels are the integer multiples of ``delta``.
        """
        if not delta > 0:
            raise DomainError(f"delta must be positive, got {delta}")
        steps = max(1, math.ceil(b_min / delta))
        return cls(steps * delta, 2 * steps + 1)

    def levels(self) -> np.ndarray:
        offsets = np.arange(self.M) - (self.M - 1) / 2.0
        return offsets * self.delta


@dataclass(frozen=True)
class ErrorSeries:
    """Normalized quantization error; values lie in [-1/2, 1/2] unless saturated."""

    values: np.ndarray
    source: str
    saturation_count: int = 0
    saturated: np.ndarray | None = None

    def __post_init__(self):
        if self.source not in ("raw", "sigma_delta"):
            raise DomainError(f"unknown error source {self.source!r}")
        values = np.array(self.values, dtype=np.float64)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def _round_half_away(u: np.ndarray, positive: np.ndarray) -> np.ndarray:
    k = np.rint(u)
    lower = np.floor(u)
    tie = (u - lower) == 0.5
    # rint breaks ties to even; redo them toward the level farther from zero
    k[tie] = lower[tie] + positive[tie]
    return k


def quantize(signal, spec: QuantizerSpec) -> tuple[SignalPath | np.ndarray, ErrorSeries]:
    """Quantize to the nearest level, ties away from zero, clipping at ``±b``.

    Returns the quantized path (a :class:`SignalPath` of the same kind
    when one is given) and the raw error ``(q - x) / delta``.  Samples with
    ``|x| > b`` are clipped to the end level and counted; their error keeps
    its true, out-of-band value.
    """
    x = np.asarray(signal, dtype=np.float64)
    delta = spec.delta
    half = (spec.M - 1) / 2.0
    shift = half - math.floor(half)  # 0 for odd M, 1/2 for even M

    u = x / delta
    k = _round_half_away(u - shift, (x >= 0).astype(np.float64))
    level = np.clip(k + shift, -half, half)
    saturated = np.abs(x) > spec.b
    error = level - u
    q = level * delta

    errors = ErrorSeries(error, "raw", int(saturated.sum()), saturated)
    if isinstance(signal, SignalPath):
        meta = {"quantizer": {"b": spec.b, "M": spec.M, "delta": delta}}
        q = SignalPath(q, signal.kind, signal.H, signal.seed, meta)
    return q, errors


def frac_cumsum(terms: np.ndarray) -> np.ndarray:
    """Fractional part of the running sum of ``terms``.

    Each term is reduced mod 1 (exact), converted to a 53-bit fixed-point
    integer, and accumulated with wrap-around unsigned arithmetic.  The
    only rounding is the per-term conversion (at most 2**-54 each), so the
    result stays accurate when the plain running sum would be far too large
    to resolve its fractional part.
    """
    f = np.mod(np.asarray(terms, dtype=np.float64), 1.0)
    fixed = np.rint(f * _FRAC_SCALE).astype(np.uint64)
    acc = np.cumsum(fixed, dtype=np.uint64) & _FRAC_MASK
    return acc.astype(np.float64) / _FRAC_SCALE


def sigma_delta_error(signal, delta: float) -> ErrorSeries:
    """Sigma-delta normalized error ``1/2 - frac(theta(n))`` in (-1/2, 1/2].

    ``theta(n) = sum_{i<=n} (x(i) / delta + 1/2)`` and ``frac`` maps into
    [0, 1).
    """
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    x = np.asarray(signal, dtype=np.float64)
    terms = np.mod(np.mod(x / delta, 1.0) + 0.5, 1.0)
    frac = frac_cumsum(terms)
    return ErrorSeries(0.5 - frac, "sigma_delta", 0)


def spread(signal: SignalPath) -> float:
    """Local spread used by the high-resolution rule."""
    x = np.asarray(signal, dtype=np.float64)
    if getattr(signal, "kind", None) == "fbm":
        x = np.diff(x)
    return float(np.std(x, ddof=1)) if x.size > 1 else 0.0


def high_resolution_spec(signal: SignalPath, ratio: float = 1 / 16) -> QuantizerSpec:
    """Smallest odd-level quantizer fine enough for ``signal``.

    ``b`` is the peak magnitude of the path (so nothing saturates) and
    ``M`` the smallest odd count with ``delta <= ratio * spread``, where the
    spread is the standard deviation of the first differences for fBm and
    of the values themselves otherwise.
    """
    if not ratio > 0:
        raise DomainError(f"ratio must be positive, got {ratio}")
    s = spread(signal)
    b = float(np.max(np.abs(np.asarray(signal, dtype=np.float64))))
    if not (s > 0 and b > 0):
        raise DomainError("signal has zero spread; no resolution rule applies")
    target = ratio * s
    steps = max(1, math.ceil(b / target))
    while 2.0 * b / (2 * steps) > target:
        steps += 1
    return QuantizerSpec(b, 2 * steps + 1)
