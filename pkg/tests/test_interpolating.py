"""Midpoint interpolation of a weight sequence and condition transfer."""

import math

import numpy as np
import pytest

from gsmoment import (HOLDS, InterpolatedPair, check_condition, gevrey,
                      interpolation_agreement, is_log_convex, q_gevrey,
                      two_interpolate)

LN12 = 2.4849066497880004


def test_even_entries_copy_the_base():
    ws = gevrey(2.0, horizon=64)
    pair = two_interpolate(ws)
    interp = pair.interpolated
    for q in range(0, 33):
        assert interp.log_weight(2 * q) == pytest.approx(
            ws.log_weight(q), abs=1e-15)


def test_odd_entries_are_log_midpoints():
    interp = two_interpolate(gevrey(2.0, horizon=64)).interpolated
    assert interp.log_weight(3) == pytest.approx(math.log(2.0), rel=1e-15)
    assert interp.log_weight(4) == pytest.approx(2 * math.log(2.0), rel=1e-15)
    assert interp.log_weight(5) == pytest.approx(LN12, rel=1e-15)


def test_interpolated_horizon_doubles():
    ws = q_gevrey(1.5, horizon=128)
    pair = two_interpolate(ws)
    assert isinstance(pair, InterpolatedPair)
    assert pair.base is ws
    assert pair.interpolated.horizon == 2 * ws.horizon


def test_interpolation_preserves_log_convexity():
    for ws in (gevrey(1.0, horizon=256), gevrey(3.0, horizon=256),
               q_gevrey(2.0, horizon=256)):
        assert is_log_convex(two_interpolate(ws).interpolated)


def test_interpolated_sequence_is_normalized():
    interp = two_interpolate(gevrey(1.5, horizon=128)).interpolated
    assert interp.log_weight(0) == 0.0
    vals = interp.log_values
    assert np.all(np.diff(vals, 2)[2:] >= -1e-9)


def test_transfer_report_shape():
    agreement = interpolation_agreement(gevrey(2.0, horizon=512))
    assert set(agreement) == {"dc", "gamma_halved", "beta"}
    for entry in agreement.values():
        assert entry["match"] in ("agree", "disagree", "unknown")
        assert {"base_condition", "base_verdict", "interpolated_condition",
                "interpolated_verdict", "match"} <= set(entry)


@pytest.mark.parametrize("make,param", [(gevrey, 1.0), (gevrey, 2.0),
                                        (gevrey, 3.0), (q_gevrey, 1.5),
                                        (q_gevrey, 2.0)])
def test_decisive_transfers_agree(make, param):
    agreement = interpolation_agreement(make(param, horizon=2048))
    for label, entry in agreement.items():
        assert entry["match"] != "disagree", (label, entry)


def test_ratio_tail_exponent_halves_under_interpolation():
    # doubling the index grid turns the exponent-2 tail condition on the
    # base into the exponent-1 condition on the refined sequence
    ws = gevrey(3.0, horizon=1024)
    interp = two_interpolate(ws).interpolated
    base_rep = check_condition(ws, "gamma2")
    interp_rep = check_condition(interp, "gamma1")
    assert base_rep.verdict == HOLDS
    assert interp_rep.verdict == HOLDS
