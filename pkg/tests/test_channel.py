import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dofsim.channel import (
    TRIAL_BLOCK,
    CsitQuality,
    RngStream,
    draw_sample,
    draw_trials,
    leakage_power_mc,
    precoding_reference,
    sigma2_of,
)


def test_sigma2_examples():
    assert sigma2_of(0, 1e6) == 1.0
    assert sigma2_of(1, 1e4) == pytest.approx(1e-4)
    assert sigma2_of(0.5, 1e4) == pytest.approx(1e-2)
    assert sigma2_of(2, 10) == pytest.approx(1e-2)
    with pytest.raises(ValueError):
        sigma2_of(-0.1, 10)
    with pytest.raises(ValueError):
        sigma2_of(0.5, 0.5)


@given(st.floats(0, 3), st.floats(1, 1e12), st.floats(1, 1e12))
def test_sigma2_in_unit_interval_and_decreasing_in_power(alpha, p1, p2):
    lo, hi = sorted((p1, p2))
    assert 0 < sigma2_of(alpha, hi) <= sigma2_of(alpha, lo) <= 1


def test_stream_determinism_and_independence():
    a = RngStream(5, (1, 2)).generator().standard_normal(4)
    b = RngStream(5).child(1, 2).generator().standard_normal(4)
    c = RngStream(5).child(1, 3).generator().standard_normal(4)
    np.testing.assert_array_equal(a, b)
    assert not np.allclose(a, c)


@given(st.integers(1, 3 * TRIAL_BLOCK), st.integers(1, 3 * TRIAL_BLOCK))
def test_trial_prefix_is_stable(n1, n2):
    rng = RngStream(11, (4,))
    a = draw_trials(rng, n1, (1, 2))
    b = draw_trials(rng, n2, (1, 2))
    k = min(n1, n2)
    np.testing.assert_array_equal(a[:k], b[:k])


def test_sample_split_and_shapes():
    q = CsitQuality(0.5, 1e4)
    ch = draw_sample(RngStream(0), (4, 2), q, trials=3000)
    for link in ((1, 1), (1, 2), (2, 1), (2, 2)):
        assert ch.H(*link).shape == (3000, 2, 4)
        np.testing.assert_array_equal(ch.H(*link), ch.H_hat(*link) + ch.H_err(*link))
    err = ch.H_err(1, 2)
    hat = ch.H_hat(1, 2)
    assert np.mean(np.abs(err) ** 2) == pytest.approx(1e-2, rel=0.05)
    assert np.mean(np.abs(hat) ** 2) == pytest.approx(1 - 1e-2, rel=0.05)
    assert abs(np.mean(err * np.conj(hat))) < 3e-3
    single = draw_sample(RngStream(0), (2, 1), q)
    assert single.H(1, 1).shape == (1, 2)


def test_common_random_numbers_across_power():
    a = draw_sample(RngStream(3), (2, 1), CsitQuality(0.5, 1e4), trials=10)
    b = draw_sample(RngStream(3), (2, 1), CsitQuality(0.5, 1e6), trials=10)
    ratio = a.H_err(2, 1) / b.H_err(2, 1)
    np.testing.assert_allclose(ratio, np.sqrt(10.0))


def test_precoding_reference_fills_zero_estimates():
    ch = draw_sample(RngStream(1), (2, 1), CsitQuality(0, 1e6), trials=50)
    assert not np.any(ch.H_hat(2, 1))
    ref = precoding_reference(ch.H_hat(2, 1), RngStream(9))
    assert np.all(np.linalg.norm(ref, axis=(-2, -1)) > 0)
    ch2 = draw_sample(RngStream(1), (2, 1), CsitQuality(0.5, 1e6), trials=50)
    np.testing.assert_array_equal(precoding_reference(ch2.H_hat(2, 1), RngStream(9)), ch2.H_hat(2, 1))


@pytest.mark.parametrize("alpha,P", [(0, 10.0), (0.5, 1e4), (1, 1e2)])
def test_leakage_identity(alpha, P):
    mean, se = leakage_power_mc(RngStream(2), alpha, P, 20_000)
    assert abs(mean - sigma2_of(alpha, P)) < 4 * se


def test_leakage_rejects_few_trials():
    with pytest.raises(ValueError):
        leakage_power_mc(RngStream(0), 0.5, 10, 10)
