import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gammaln, gammasgn

from fracq import DomainError, InconclusiveError, ResourceError
from fracq.weights import (
    MIN_TAIL_N,
    TailClass,
    classify_tail,
    lower_bound_holds,
    partial_sums,
    weights,
)


def gamma_oracle(d, n):
    """sign * exp(log|G(n+d)| - log|G(d)| - log|G(n+1)|), sign tracked apart."""
    n = np.arange(n + 1, dtype=np.float64)
    sign = gammasgn(n + d) * gammasgn(d)
    return sign * np.exp(gammaln(n + d) - gammaln(d) - gammaln(n + 1))


def test_first_two_weights():
    np.testing.assert_array_equal(weights(0.3, 1).values, [1.0, 0.3])


def test_d_zero_is_identity_filter():
    np.testing.assert_array_equal(weights(0.0, 3).values, [1.0, 0.0, 0.0, 0.0])


def test_d_03_third_weight():
    np.testing.assert_allclose(weights(0.3, 2).values, [1.0, 0.3, 0.195], rtol=1e-15)
    np.testing.assert_allclose(weights(0.3, 2).values, gamma_oracle(0.3, 2), rtol=1e-12)


def test_partial_sums_examples():
    np.testing.assert_allclose(partial_sums(weights(0.3, 1)).values, [1.0, 1.3])
    np.testing.assert_allclose(partial_sums(weights(-0.3, 2)).values, [1.0, 0.7, 0.595],
                               rtol=1e-15)
    np.testing.assert_array_equal(partial_sums(weights(0.0, 5)).values, np.ones(6))
    assert partial_sums(weights(0.3, 1)).d == pytest.approx(1.3)


@pytest.mark.parametrize("d", [-0.3, -0.1, 0.3, 0.49])
def test_hockey_stick(d):
    lhs = partial_sums(weights(d, 10_000)).values
    np.testing.assert_allclose(lhs, weights(d + 1, 10_000).values, rtol=1e-12)


@pytest.mark.parametrize("d", [-0.45, -0.3, -0.1, 0.1, 0.3, 0.49, 1.3, 2.4])
def test_recurrence_matches_log_gamma(d):
    np.testing.assert_allclose(weights(d, 1000).values, gamma_oracle(d, 1000), rtol=1e-10)


@given(d=st.floats(-0.499, 2.499), n=st.integers(1, 300))
@settings(max_examples=60, deadline=None)
def test_recurrence_exact_as_computed(d, n):
    w = weights(d, n).values
    assert w[0] == 1.0
    # w_n = w_{n-1} * ((n - 1 + d) / n), evaluated step by step
    expected = [1.0]
    for i in range(1, n + 1):
        expected.append(expected[-1] * ((i - 1 + d) / i))
    np.testing.assert_array_equal(w, expected)


@given(d=st.floats(-0.499, -1e-6))
@settings(max_examples=40, deadline=None)
def test_sign_pattern_antipersistent(d):
    w = weights(d, 500).values
    assert w[0] > 0
    assert np.all(w[1:] < 0)


@pytest.mark.parametrize("d", [-0.5, 2.5, 3.0, math.nan])
def test_weights_domain(d):
    with pytest.raises(DomainError):
        weights(d, 10)


def test_weights_resource_ceiling(monkeypatch):
    monkeypatch.setenv("FRACQ_MAX_N", "100")
    weights(0.3, 99)
    with pytest.raises(ResourceError):
        weights(0.3, 100)


def test_weights_readonly():
    w = weights(0.3, 5)
    with pytest.raises(ValueError):
        w.values[1] = 0.0
    assert len(w) == 6 and w.nmax == 5


@pytest.mark.parametrize("d", [-0.45, -0.25, -0.1, -0.01])
def test_classify_tail_negative_d_vanishes(d):
    assert classify_tail(d, 10_000, 0.5) is TailClass.VANISHES


@pytest.mark.parametrize("d,eta", [(0.3, 10.0), (0.1, 0.5), (0.01, 1.0), (0.45, 5.0)])
def test_classify_tail_positive_d_exceeds(d, eta):
    assert classify_tail(d, 10_000, eta) is TailClass.EXCEEDS_ETA_INFINITELY_OFTEN


def test_classify_tail_d_zero():
    assert classify_tail(0.0, 100, 0.5) is TailClass.CONSTANT_ONE


def test_classify_tail_inconclusive():
    # weights(1.3) grow like n**0.3, reaching only about 14 by n = 1e4
    with pytest.raises(InconclusiveError):
        classify_tail(0.3, 10_000, 1e6)


def test_classify_tail_short_range():
    with pytest.raises(DomainError):
        classify_tail(0.3, MIN_TAIL_N - 1, 0.5)


def test_lower_bound_first_index_fails():
    rep = lower_bound_holds(0.25, 1)
    assert rep.partial_sums[0] == pytest.approx(0.75)
    assert not rep.all_hold


@pytest.mark.parametrize("H,start", [(0.1, 55), (0.2, 5), (0.25, 3), (0.4, 2), (0.49, 2)])
def test_lower_bound_onset(H, start):
    # the asymptotic bound kicks in at a small, H-dependent index
    rep = lower_bound_holds(H, 10_000)
    assert rep.holds_from == start
    assert rep.holds_on(start)


def test_lower_bound_h025_n2():
    rep = lower_bound_holds(0.25, 2)
    # S_2 = 1 - 1/4 - 3/32
    assert rep.partial_sums[1] == pytest.approx(0.65625, rel=1e-15)
    assert rep.partial_sums[1] < 1 / math.sqrt(2)


def test_lower_bound_domain():
    for H in (0.0, 0.5, 0.8):
        with pytest.raises(DomainError):
            lower_bound_holds(H, 10)
