"""Weight sequence construction and the associated counting function."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gsmoment import (DEFAULT_HORIZON, HorizonExceeded, IndexOutOfHorizon,
                      InvalidParameter, NotAWeightSequence,
                      RequiresLogConvexity, associated_function, from_expr,
                      from_table, gevrey, is_log_convex, make_sequence,
                      q_gevrey)


def test_gevrey_log_values_match_factorial_powers():
    ws = gevrey(1.0, horizon=64)
    assert ws.log_weight(0) == 0.0
    assert ws.log_weight(3) == pytest.approx(math.log(6.0), rel=1e-15)
    ws2 = gevrey(2.0, horizon=64)
    assert ws2.log_weight(3) == pytest.approx(2.0 * math.log(6.0), rel=1e-15)


def test_q_gevrey_log_values_are_square_multiples_of_log_q():
    ws = q_gevrey(2.0, horizon=64)
    assert ws.log_weight(3) == pytest.approx(9.0 * math.log(2.0), rel=1e-15)
    assert ws.log_weight(4) == pytest.approx(16.0 * math.log(2.0), rel=1e-15)


def test_default_horizon_applies():
    assert gevrey(1.5).horizon == DEFAULT_HORIZON


def test_table_requires_normalized_start():
    logs = list(gevrey(1.0, horizon=64).log_values)
    logs[0] = 1.0
    with pytest.raises(NotAWeightSequence):
        from_table(logs)


def test_table_requires_divergent_ratios():
    # constant-ratio data (pure geometric growth) carries no divergence
    # witness over the horizon and is rejected
    with pytest.raises(NotAWeightSequence):
        from_table([0.5 * p for p in range(65)])


def test_bad_parameters_rejected():
    with pytest.raises(InvalidParameter):
        gevrey(-1.0)
    with pytest.raises(InvalidParameter):
        q_gevrey(1.0)
    with pytest.raises(InvalidParameter):
        gevrey(1.0, horizon=3)


def test_expr_table_matches_direct_evaluation():
    ws = from_expr("2.0 * p * log(p + 1)", horizon=64)
    assert ws.log_weight(5) == pytest.approx(10.0 * math.log(6.0), rel=1e-14)


def test_descriptor_roundtrip_reproduces_values():
    for ws in (gevrey(2.5, horizon=128), q_gevrey(1.5, horizon=128),
               from_table(list(gevrey(2.0, horizon=64).log_values))):
        back = make_sequence(ws.descriptor())
        assert back.horizon == ws.horizon
        np.testing.assert_allclose(back.log_values, ws.log_values,
                                   rtol=0, atol=0)


def test_log_weight_array_agrees_with_scalar():
    ws = gevrey(1.5, horizon=64)
    idx = np.array([0, 1, 7, 64])
    np.testing.assert_allclose(ws.log_weight_array(idx),
                               [ws.log_weight(int(i)) for i in idx])
    # closed-form kinds extend past the cache
    assert ws.log_weight(65) == pytest.approx(
        1.5 * math.lgamma(66.0), rel=1e-15)


def test_table_backed_sequence_stops_at_horizon():
    ws = from_table(list(gevrey(1.0, horizon=64).log_values))
    with pytest.raises(IndexOutOfHorizon):
        ws.log_weight(65)
    with pytest.raises(IndexOutOfHorizon):
        ws.log_weight(-1)


def _brute_force_counting(ws, t):
    # direct sup of p log t - log M_p over the horizon
    logt = math.log(t)
    p = np.arange(ws.horizon + 1)
    return float(np.max(p * logt - ws.log_values))


def test_counting_function_matches_brute_force_on_gevrey():
    ws = gevrey(2.0, horizon=512)
    assoc = ws.associated()
    for t in np.geomspace(1e-3, assoc.max_argument * 0.9, 40):
        lhs = assoc.value(t)
        rhs = _brute_force_counting(ws, t)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_counting_function_vanishes_below_first_ratio():
    ws = gevrey(2.0, horizon=64)
    first_ratio = math.exp(ws.log_weight(1) - ws.log_weight(0))
    assoc = ws.associated()
    assert assoc.value(first_ratio * 0.5) == 0.0
    assert assoc.value(1e-12) == 0.0


def test_counting_function_raises_past_horizon_argument():
    ws = gevrey(1.0, horizon=64)
    assoc = ws.associated()
    with pytest.raises(HorizonExceeded):
        assoc.value(assoc.max_argument * 1.01)


def test_counting_function_requires_log_convexity():
    logs = np.array(gevrey(2.0, horizon=64).log_values)
    logs[10] -= 0.5  # dent one interior value; ratios stay divergent
    ws = from_table(logs)
    assert not is_log_convex(ws)
    with pytest.raises(RequiresLogConvexity):
        ws.associated()


def test_counting_function_vectorized_values():
    ws = q_gevrey(2.0, horizon=256)
    assoc = ws.associated()
    ts = np.geomspace(0.5, 100.0, 17)
    np.testing.assert_allclose(assoc.values(ts),
                               [assoc.value(float(t)) for t in ts])
    assert associated_function(ws, 10.0) == assoc.value(10.0)


@settings(max_examples=60, deadline=None)
@given(alpha=st.floats(min_value=0.5, max_value=4.0),
       t=st.floats(min_value=1e-6, max_value=1e3))
def test_counting_matches_brute_force_property(alpha, t):
    ws = gevrey(alpha, horizon=256)
    assoc = ws.associated()
    if t > assoc.max_argument:
        return
    assert assoc.value(t) == pytest.approx(_brute_force_counting(ws, t),
                                           rel=1e-12, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(alpha=st.floats(min_value=0.5, max_value=4.0))
def test_counting_is_monotone_in_argument(alpha):
    ws = gevrey(alpha, horizon=128)
    assoc = ws.associated()
    ts = np.geomspace(1e-4, assoc.max_argument * 0.99, 25)
    vals = assoc.values(ts)
    assert np.all(np.diff(vals) >= -1e-12)
    assert np.all(vals >= 0.0)


def test_log_convexity_detects_gevrey_tables():
    assert is_log_convex(gevrey(1.0, horizon=128))
    assert is_log_convex(q_gevrey(1.5, horizon=128))
