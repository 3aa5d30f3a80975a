"""Fractional-difference weights and their partial sums.

The weight of order ``d`` at index ``n`` is

    w_n(d) = Gamma(n + d) / (Gamma(d) Gamma(n + 1)),

the coefficient of z**n in (1 - z)**(-d).  The fGn filter uses
``d = H - 1/2``.  Partial sums of ``w(d)`` are ``w(d + 1)`` (hockey-stick
identity), so one type covers the fGn weights (d), their running sums
(d + 1) and the double running sums that drive fBm (d + 2).
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from fracq.errors import DomainError, InconclusiveError, ResourceError

D_MIN = -0.5
D_MAX = 2.5

DEFAULT_MAX_N = 2**22

# Smallest range classify_tail accepts for d != 0.
MIN_TAIL_N = 1000


def max_n() -> int:
    """Sequence length ceiling, overridable through ``FRACQ_MAX_N``."""
    raw = os.environ.get("FRACQ_MAX_N")
    if raw is None:
        return DEFAULT_MAX_N
    try:
        value = int(raw)
    except ValueError:
        raise DomainError(f"FRACQ_MAX_N must be an integer, got {raw!r}") from None
    if value < 1:
        raise DomainError(f"FRACQ_MAX_N must be positive, got {value}")
    return value


def check_length(n: int, what: str = "length") -> None:
    if n > max_n():
        raise ResourceError(f"{what} {n} exceeds ceiling {max_n()} (FRACQ_MAX_N)")


@dataclass(frozen=True)
class WeightSequence:
    """Weights ``w_0 .. w_nmax`` of fractional order ``d``."""

    d: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise DomainError("weight values must be a non-empty 1-D sequence")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def nmax(self) -> int:
        return self.values.size - 1

    def __len__(self):
        return self.values.size

    def __getitem__(self, item):
        return self.values[item]


@lru_cache(maxsize=64)
def _weight_values(d: float, nmax: int) -> np.ndarray:
    n = np.arange(1, nmax + 1, dtype=np.float64)
    factors = np.empty(nmax + 1)
    factors[0] = 1.0
    factors[1:] = (n - 1.0 + d) / n
    # accumulate is sequential, so w[n] == w[n-1] * factors[n] bit for bit
    values = np.multiply.accumulate(factors)
    values.flags.writeable = False
    return values


def weights(d: float, nmax: int) -> WeightSequence:
    """Fractional-difference weights ``w_0(d) .. w_nmax(d)``.

    Computed with the ratio recurrence ``w_n = w_{n-1} (n - 1 + d) / n``
    starting from ``w_0 = 1``; the Gamma functions are never evaluated.

    Parameters
    ----------
    d : float
        Fractional order, must lie in the open interval (-1/2, 5/2).
    nmax : int
        Largest index; the result has ``nmax + 1`` entries.

    Raises
    ------
    DomainError
        If ``d`` is outside (-1/2, 5/2) or ``nmax`` is negative.
    ResourceError
        If ``nmax`` exceeds the configured length ceiling.
    """
    d = float(d)
    if not (D_MIN < d < D_MAX):
        raise DomainError(f"fractional order d={d} outside ({D_MIN}, {D_MAX})")
    nmax = int(nmax)
    if nmax < 0:
        raise DomainError(f"nmax must be >= 0, got {nmax}")
    check_length(nmax + 1, "weight count")
    return WeightSequence(d, _weight_values(d, nmax))


def partial_sums(w: WeightSequence) -> WeightSequence:
    """Running sums of ``w``; mathematically equal to ``weights(w.d + 1)``."""
    d = w.d + 1.0
    if not d < D_MAX:
        raise DomainError(f"partial sums of order {w.d} leave the admissible range")
    return WeightSequence(d, np.cumsum(w.values))


class TailClass(str, enum.Enum):
    VANISHES = "vanishes"
    CONSTANT_ONE = "constant_one"
    EXCEEDS_ETA_INFINITELY_OFTEN = "exceeds_eta_infinitely_often"


def classify_tail(d: float, nmax: int, eta: float) -> TailClass:
    """Classify the long-run behaviour of the partial sums of ``weights(d)``.

    ``vanishes``
        ``|S_n|`` is strictly decreasing over the last half of the range and
        its log-log slope there is clearly negative, so the sums go to zero.
    ``constant_one``
        Every partial sum equals one (only ``w_0`` is nonzero).
    ``exceeds_eta_infinitely_often``
        The indices with ``|S_n| > eta`` have positive density over the last
        half of the range, and that density does not drop from the third to
        the fourth quarter.

    Anything else raises :class:`InconclusiveError`.  For ``d != 0`` the
    range must be at least ``MIN_TAIL_N``.
    """
    if eta <= 0:
        raise DomainError(f"eta must be positive, got {eta}")
    sums = partial_sums(weights(d, nmax)).values
    if np.all(sums == 1.0):
        return TailClass.CONSTANT_ONE
    if nmax < MIN_TAIL_N:
        raise DomainError(f"nmax={nmax} below the minimum {MIN_TAIL_N} for d != 0")

    half = nmax // 2
    tail = np.abs(sums[half:])
    idx = np.arange(half, nmax + 1, dtype=np.float64)

    if np.all(tail > 0) and np.all(np.diff(tail) < 0):
        slope = np.polyfit(np.log(idx), np.log(tail), 1)[0]
        if slope < -1e-3:
            return TailClass.VANISHES

    above = tail > eta
    quarter = above.size // 2
    third, fourth = above[:quarter].mean(), above[quarter:].mean()
    if above.mean() > 0 and fourth > 0 and fourth >= third:
        return TailClass.EXCEEDS_ETA_INFINITELY_OFTEN

    raise InconclusiveError(
        f"partial sums of weights(d={d}) neither vanish nor exceed eta={eta} "
        f"persistently within nmax={nmax}"
    )


@dataclass(frozen=True)
class LowerBoundReport:
    """Per-index comparison of partial sums against ``1/sqrt(n)``.

    ``holds[i]`` refers to index ``n = i + 1``.
    """

    H: float
    partial_sums: np.ndarray
    bound: np.ndarray
    holds: np.ndarray

    @property
    def nmax(self) -> int:
        return self.holds.size

    @property
    def all_hold(self) -> bool:
        return bool(self.holds.all())

    def holds_on(self, start: int, stop: int | None = None) -> bool:
        stop = self.nmax if stop is None else stop
        return bool(self.holds[start - 1 : stop].all())

    @property
    def failures(self) -> np.ndarray:
        return np.flatnonzero(~self.holds) + 1

    @property
    def holds_from(self) -> int:
        """Smallest ``n0`` with the bound holding for every ``n >= n0``."""
        fails = self.failures
        return 1 if fails.size == 0 else int(fails[-1]) + 1

    def __bool__(self):
        return self.all_hold


def lower_bound_holds(H: float, nmax: int) -> LowerBoundReport:
    """Check ``sum_{i<=n} w_i(H - 1/2) >= 1/sqrt(n)`` for ``n = 1..nmax``.

    Only meaningful for anti-persistent ``H`` in (0, 1/2), where the partial
    sums decay to zero like ``n**(H - 1/2) / Gamma(H + 1/2)``.  The bound
    is asymptotic; for small ``H`` it fails at the first few indices.
    """
    if not 0.0 < H < 0.5:
        raise DomainError(f"H={H} outside (0, 1/2)")
    if nmax < 1:
        raise DomainError(f"nmax must be >= 1, got {nmax}")
    sums = partial_sums(weights(H - 0.5, nmax)).values[1:]
    bound = 1.0 / np.sqrt(np.arange(1, nmax + 1, dtype=np.float64))
    return LowerBoundReport(H, sums, bound, sums >= bound)
