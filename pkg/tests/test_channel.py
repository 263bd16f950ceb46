import math

import pytest
from hypothesis import given, strategies as st

from lowlayer.channel import (DecodeOutcome, LinkBudget, decode_outcome, sinr, sinr_for_rate, spectral_efficiency,
                              throughput_mbps)
from lowlayer.core import ResourceAllocation

powers = st.floats(-130, 0, allow_nan=False)


def test_link_budget():
    assert LinkBudget(23.0, 100.0).rx_power_dbm == -77.0


def test_sinr_examples():
    assert sinr(-80, [], -90).sinr_db == pytest.approx(10.0)
    assert sinr(-80, [-80], -120).sinr_db == pytest.approx(0.0, abs=1e-3)
    assert sinr(-80, [-80, -80], -200).sinr_db == pytest.approx(-3.0103, abs=1e-4)


@given(powers, st.lists(powers, max_size=5), st.randoms())
def test_sinr_permutation_invariant(target, interferers, rnd):
    shuffled = list(interferers)
    rnd.shuffle(shuffled)
    assert sinr(target, interferers).sinr_db == sinr(target, shuffled).sinr_db


@given(powers, st.lists(powers, min_size=1, max_size=4), st.floats(0.1, 20))
def test_sinr_decreases_with_interference(target, interferers, bump):
    louder = [interferers[0] + bump] + interferers[1:]
    assert sinr(target, louder).sinr_db <= sinr(target, interferers).sinr_db


def test_decode_outcome_examples():
    assert decode_outcome(-80, -77) is DecodeOutcome.SPOOF
    assert decode_outcome(None, -100, occupied=False) is DecodeOutcome.SPOOF
    assert decode_outcome(-80, -100, occupied=False) is DecodeOutcome.SPOOF
    assert decode_outcome(-80, -79) is DecodeOutcome.COLLISION
    assert decode_outcome(-80, None) is DecodeOutcome.LEGIT
    assert decode_outcome(None, -115) is DecodeOutcome.COLLISION
    with pytest.raises(ValueError):
        decode_outcome(None, None)


@given(powers, powers)
def test_decode_outcome_antisymmetric(a, b):
    swap = {DecodeOutcome.LEGIT: DecodeOutcome.SPOOF, DecodeOutcome.SPOOF: DecodeOutcome.LEGIT,
            DecodeOutcome.COLLISION: DecodeOutcome.COLLISION}
    assert decode_outcome(b, a) is swap[decode_outcome(a, b)]


def test_throughput_cap_and_zero():
    cap = throughput_mbps(50, 200.0)
    assert cap == pytest.approx(50 * 180e3 * 7.4 * 0.7 / 1e6)
    assert throughput_mbps(ResourceAllocation(0, 50), -math.inf) == 0.0
    assert spectral_efficiency(-math.inf) == 0.0


@given(st.integers(1, 100), st.floats(-20, 40), st.floats(0, 10))
def test_throughput_monotone_and_linear(num_rb, s, ds):
    assert throughput_mbps(num_rb, s + ds) >= throughput_mbps(num_rb, s)
    assert throughput_mbps(2 * num_rb, s) == pytest.approx(2 * throughput_mbps(num_rb, s))


def test_sinr_for_rate_inverts_throughput():
    s = sinr_for_rate(10.5, 50)
    assert throughput_mbps(50, s) == pytest.approx(10.5)
    with pytest.raises(ValueError):
        sinr_for_rate(1e4, 1)
