import pytest
from hypothesis import given, strategies as st

from lowlayer.core import (AmbiguousWrap, ResourceAllocation, SlotTime, clamp_tx_power, slot_advance,
                           slots_between, subframes_between)


def counter_advance(t: SlotTime, n: int) -> SlotTime:
    """Brute-force oracle: carry one slot at a time."""
    sfn, sf, slot = t.sfn, t.subframe, t.slot
    for _ in range(n):
        slot += 1
        if slot == 1 << t.mu:
            slot, sf = 0, sf + 1
            if sf == 10:
                sf, sfn = 0, (sfn + 1) % 1024
    return SlotTime(sfn, sf, slot, t.mu)


slot_times = st.integers(0, 4).flatmap(
    lambda mu: st.builds(SlotTime, st.integers(0, 1023), st.integers(0, 9), st.integers(0, (1 << mu) - 1),
                         st.just(mu)))


def test_advance_examples():
    assert slot_advance(SlotTime(0, 0, 0, 0), 10) == SlotTime(1, 0, 0, 0)
    assert slot_advance(SlotTime(1023, 9, 0, 0), 1) == SlotTime(0, 0, 0, 0)
    assert slot_advance(SlotTime(0, 0, 7, 3), 1) == SlotTime(0, 1, 0, 3)


@pytest.mark.parametrize("mu", [0, 1, 3])
def test_advance_matches_counter_oracle(mu):
    t = SlotTime(1022, 8, (1 << mu) - 1, mu)
    for n in (0, 1, 2, 7, 8, 9, 31, 80, 250):
        assert slot_advance(t, n) == counter_advance(t, n)


def test_advance_rejects_negative():
    with pytest.raises(ValueError):
        slot_advance(SlotTime(), -1)


@given(slot_times, st.integers(0, 50_000), st.integers(0, 50_000))
def test_advance_associative(t, a, b):
    assert slot_advance(slot_advance(t, a), b) == slot_advance(t, a + b)


@given(slot_times, st.integers(0, 5000))
def test_subframes_between_inverts_advance(t, k):
    assert subframes_between(t, slot_advance(t, k << t.mu)) == k


def test_subframes_between_examples():
    assert subframes_between(SlotTime(0, 0), SlotTime(0, 7)) == 7
    assert subframes_between(SlotTime(1023, 9), SlotTime(0, 1)) == 2
    assert subframes_between(SlotTime(5, 5), SlotTime(5, 5)) == 0


def test_ambiguous_wrap():
    with pytest.raises(AmbiguousWrap):
        subframes_between(SlotTime(0, 0), SlotTime(512, 0))
    with pytest.raises(AmbiguousWrap):
        subframes_between(SlotTime(0, 5), SlotTime(0, 1))
    assert slots_between(SlotTime(0, 5), SlotTime(0, 1)) == -4


def test_slot_time_validation():
    with pytest.raises(ValueError):
        SlotTime(1024, 0)
    with pytest.raises(ValueError):
        SlotTime(0, 10)
    with pytest.raises(ValueError):
        SlotTime(0, 0, 2, 1)


def test_allocation():
    a = ResourceAllocation(10, 5)
    assert a.stop_rb == 15 and a.fits(15) and not a.fits(14)
    assert a.overlap(ResourceAllocation(12, 10)) == 3
    assert a.overlap(ResourceAllocation(15, 1)) == 0
    with pytest.raises(ValueError):
        ResourceAllocation(0, 0)
    with pytest.raises(ValueError):
        ResourceAllocation(-1, 1)


def test_power_clamp():
    assert clamp_tx_power(30.0) == 23.0
    assert clamp_tx_power(-100.0) == -60.0
    assert clamp_tx_power(5.5) == 5.5
