from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracq import DomainError, QuantizerSpec, high_resolution_spec, quantize, sigma_delta_error
from fracq.quantization import ErrorSeries, frac_cumsum, spread
from fracq.synthesis import fbm, fgn, gaussian_white


def brute_quantize(x, spec):
    """Nearest level by exhaustive search; ties go to the level farther from zero."""
    levels = spec.levels()
    out = []
    for v in x:
        dist = np.abs(levels - v)
        best = np.flatnonzero(dist == dist.min())
        out.append(levels[best[-1]] if v >= 0 else levels[best[0]])
    return np.array(out)


def exact_sigma_delta(x, delta):
    theta = Fraction(0)
    out = []
    for v in x:
        theta += Fraction(v) / Fraction(delta) + Fraction(1, 2)
        out.append(float(Fraction(1, 2) - (theta - (theta.numerator // theta.denominator))))
    return np.array(out)


def test_spec_levels():
    spec = QuantizerSpec(1.0, 3)
    np.testing.assert_array_equal(spec.levels(), [-1.0, 0.0, 1.0])
    assert spec.delta == 1.0
    spec = QuantizerSpec(2.5, 6)
    np.testing.assert_allclose(spec.levels(), [-2.5, -1.5, -0.5, 0.5, 1.5, 2.5])


@given(b=st.floats(1e-3, 1e6), M=st.integers(2, 10_000))
def test_spec_step_identity(b, M):
    spec = QuantizerSpec(b, M)
    assert spec.delta * (spec.M - 1) == pytest.approx(2 * b, rel=1e-12)


@pytest.mark.parametrize("b,M", [(0.0, 3), (-1.0, 3), (np.inf, 3), (1.0, 1), (1.0, 2.5)])
def test_spec_domain(b, M):
    with pytest.raises(DomainError):
        QuantizerSpec(b, M)


def test_from_step():
    spec = QuantizerSpec.from_step(1.0, 3.2)
    assert spec.delta == 1.0 and spec.b == 4.0 and spec.M == 9
    assert QuantizerSpec.from_step(0.5, 0.0).M == 3


def test_quantize_example():
    q, e = quantize(np.array([0.4]), QuantizerSpec(1.0, 3))
    assert q[0] == 0.0
    assert e.values[0] == pytest.approx(-0.4)
    assert e.saturation_count == 0


def test_ties_away_from_zero():
    spec = QuantizerSpec(2.0, 5)
    q, e = quantize(np.array([0.5, -0.5, 1.5, -1.5, 0.0]), spec)
    np.testing.assert_array_equal(q, [1.0, -1.0, 2.0, -2.0, 0.0])
    np.testing.assert_array_equal(e.values, [0.5, -0.5, 0.5, -0.5, 0.0])
    # even M: zero is a tie between +-delta/2
    q, _ = quantize(np.array([0.0, -0.0, 1.0, -1.0]), QuantizerSpec(1.5, 4))
    np.testing.assert_array_equal(q, [0.5, 0.5, 1.5, -1.5])


@given(x=st.lists(st.floats(-50, 50), min_size=1, max_size=60),
       b=st.floats(0.5, 40), M=st.integers(2, 200))
@settings(max_examples=150, deadline=None)
def test_quantize_matches_brute_force(x, b, M):
    x = np.array(x)
    spec = QuantizerSpec(b, M)
    q, e = quantize(x, spec)
    np.testing.assert_allclose(q, brute_quantize(x, spec), rtol=0, atol=1e-9 * b)
    assert e.saturation_count == int(np.sum(np.abs(x) > b))
    inside = ~e.saturated
    assert np.all(np.abs(e.values[inside]) <= 0.5 + 1e-12)
    np.testing.assert_allclose(e.values, (q - x) / spec.delta, atol=1e-9)


def test_saturation():
    q, e = quantize(np.array([3.0, -7.0, 0.2]), QuantizerSpec(1.0, 3))
    np.testing.assert_array_equal(q, [1.0, -1.0, 0.0])
    assert e.saturation_count == 2
    np.testing.assert_array_equal(e.saturated, [True, True, False])
    assert e.values[0] == pytest.approx(-2.0)


def test_coarse_quantizer_on_fbm():
    path = fbm(0.8, 4096, 7)
    q, e = quantize(path, QuantizerSpec(1e9, 3))
    assert q.kind == "fbm" and q.H == 0.8
    assert np.all(q.values == 0.0)
    assert e.saturation_count == 0


def test_sigma_delta_example():
    e = sigma_delta_error(np.array([0.3, 0.7]), 1.0)
    np.testing.assert_allclose(e.values, [-0.3, 0.5], atol=1e-15)
    assert e.source == "sigma_delta"


@given(x=st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=80),
       delta=st.sampled_from([1.0, 0.5, 0.1, 3.0, 1 / 16]))
@settings(max_examples=100, deadline=None)
def test_sigma_delta_matches_exact_arithmetic(x, delta):
    e = sigma_delta_error(np.array(x), delta).values
    ref = exact_sigma_delta(x, delta)
    # equal modulo 1: the branch point 1/2 <-> -1/2 may flip by rounding
    diff = np.abs(e - ref)
    np.testing.assert_array_less(np.minimum(diff, np.abs(diff - 1.0)), 1e-9)
    assert np.all((e > -0.5) & (e <= 0.5))


def test_frac_cumsum_large_sums():
    # plain cumsum of 1e5 terms near 1e6 loses the fractional part entirely
    rng = np.random.default_rng(0)
    k = rng.integers(0, 2**20, 100_000)
    terms = k / 2.0**20 + 1e6
    expected = np.cumsum(k) % 2**20 / 2.0**20
    np.testing.assert_array_equal(frac_cumsum(terms), expected)


@pytest.mark.parametrize("k", [-4, -2, 2, 6, 1, -3])
def test_sigma_delta_integer_shift(k):
    # dyadic samples and step keep every shift exact in floating point
    m = np.random.default_rng(abs(k)).integers(-2**20, 2**20, 5000)
    x = m / 2.0**16
    delta = 0.25
    e0 = sigma_delta_error(x, delta).values
    e1 = sigma_delta_error(x + k * delta, delta).values
    np.testing.assert_array_equal(e0, e1)


def test_spread_and_hires_white():
    w = gaussian_white(50_000, 1)
    spec = high_resolution_spec(w)
    assert spec.delta <= spread(w) / 16
    assert spec.delta <= 1 / 16 * 1.02
    assert spec.M % 2 == 1
    assert spec.b == np.max(np.abs(w.values))
    _, e = quantize(w, spec)
    assert e.saturation_count == 0


def test_spread_fbm_uses_increments():
    p = fbm(0.5, 10_000, 2)
    assert spread(p) == pytest.approx(np.std(np.diff(p.values), ddof=1))
    assert spread(fgn(0.5, 10_000, 2)) == pytest.approx(1.0, abs=0.03)


def test_hires_domain():
    with pytest.raises(DomainError):
        high_resolution_spec(gaussian_white(10, 0), ratio=0)
    with pytest.raises(DomainError):
        high_resolution_spec(np.zeros(10))
    with pytest.raises(DomainError):
        sigma_delta_error(np.ones(4), 0.0)


def test_error_series_readonly():
    e = ErrorSeries([0.1, 0.2], "raw")
    with pytest.raises(ValueError):
        e.values[0] = 0.0
    with pytest.raises(DomainError):
        ErrorSeries([0.1], "dither")
