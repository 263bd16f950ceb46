"""Shared vocabulary: slot timing, RNTIs, resource allocations and transmit power.

Time is tracked at slot granularity. A :class:`SlotTime` is a position inside
the 1024-frame SFN cycle; comparisons that have to survive the SFN wrap go
through :func:`subframes_between` / :func:`slots_between`, which only accept
separations of less than half the cycle.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

SFN_CYCLE = 1024
SUBFRAMES_PER_FRAME = 10
HALF_CYCLE_FRAMES = SFN_CYCLE // 2

UE_MAX_POWER_DBM = 23.0
UE_MIN_POWER_DBM = -60.0


class AmbiguousWrap(ValueError):
    """Two instants are too far apart to be ordered across the SFN wrap."""


@dataclass(frozen=True, order=True)
class SlotTime:
    sfn: int = 0
    subframe: int = 0
    slot: int = 0
    mu: int = field(default=0, compare=False)

    def __post_init__(self):
        if not 0 <= self.sfn < SFN_CYCLE:
            raise ValueError(f"sfn {self.sfn} outside 0..1023")
        if not 0 <= self.subframe < SUBFRAMES_PER_FRAME:
            raise ValueError(f"subframe {self.subframe} outside 0..9")
        if not 0 <= self.slot < (1 << self.mu):
            raise ValueError(f"slot {self.slot} invalid for mu={self.mu}")

    @property
    def slots_per_subframe(self) -> int:
        return 1 << self.mu

    def index(self) -> int:
        """Slot count since (sfn=0, sf=0, slot=0)."""
        return (self.sfn * SUBFRAMES_PER_FRAME + self.subframe) * self.slots_per_subframe + self.slot

    @classmethod
    def from_index(cls, index: int, mu: int = 0) -> "SlotTime":
        spsf = 1 << mu
        index %= SFN_CYCLE * SUBFRAMES_PER_FRAME * spsf
        sf_total, slot = divmod(index, spsf)
        sfn, subframe = divmod(sf_total, SUBFRAMES_PER_FRAME)
        return cls(sfn, subframe, slot, mu)

    def __str__(self):
        return f"{self.sfn}.{self.subframe}.{self.slot}"


def slots_per_cycle(mu: int) -> int:
    return SFN_CYCLE * SUBFRAMES_PER_FRAME * (1 << mu)


def slot_duration_ms(mu: int) -> float:
    return 1.0 / (1 << mu)


def slot_advance(t: SlotTime, n_slots: int) -> SlotTime:
    if n_slots < 0:
        raise ValueError("n_slots must be non-negative")
    return SlotTime.from_index(t.index() + n_slots, t.mu)


def slots_between(a: SlotTime, b: SlotTime) -> int:
    """Signed slot distance from ``a`` to ``b`` (positive when ``b`` is later).

    The shorter way around the SFN cycle is taken; separations of 512 frames
    or more cannot be ordered and raise :class:`AmbiguousWrap`.
    """
    if a.mu != b.mu:
        raise ValueError("numerology mismatch")
    cycle = slots_per_cycle(a.mu)
    diff = (b.index() - a.index()) % cycle
    half = cycle // 2
    if diff == half:
        raise AmbiguousWrap(f"{a} and {b} are half a cycle apart")
    if diff > half:
        diff -= cycle
    return diff


def subframes_between(a: SlotTime, b: SlotTime) -> int:
    """Whole subframes from ``a`` to ``b`` where ``a`` precedes ``b``."""
    diff = slots_between(a, b)
    if diff < 0:
        raise AmbiguousWrap(f"{b} precedes {a} (or they are >512 frames apart)")
    return diff // (1 << a.mu)


def is_after(a: SlotTime, b: SlotTime) -> bool:
    """True when ``a`` is strictly later than ``b`` (wrap-aware)."""
    return slots_between(b, a) > 0


class Direction(enum.Enum):
    DL = "DL"
    UL = "UL"


@dataclass(frozen=True)
class ResourceAllocation:
    """Contiguous RB range. ``slot`` is None when the allocation is relative to
    the PDCCH occasion that carried it (as inside a DCI)."""

    start_rb: int
    num_rb: int
    direction: Direction = Direction.DL
    slot: SlotTime | None = None

    def __post_init__(self):
        if self.num_rb < 1:
            raise ValueError("num_rb must be >= 1")
        if self.start_rb < 0:
            raise ValueError("start_rb must be >= 0")

    @property
    def stop_rb(self) -> int:
        return self.start_rb + self.num_rb

    def fits(self, bandwidth_rb: int) -> bool:
        return self.stop_rb <= bandwidth_rb

    def overlap(self, other: "ResourceAllocation") -> int:
        return max(0, min(self.stop_rb, other.stop_rb) - max(self.start_rb, other.start_rb))


def check_rnti(value: int) -> int:
    if not 0 <= value <= 0xFFFF:
        raise ValueError(f"RNTI {value:#x} is not a 16-bit value")
    return value


def clamp_tx_power(dbm: float, max_dbm: float = UE_MAX_POWER_DBM) -> float:
    return min(max(dbm, UE_MIN_POWER_DBM), max_dbm)


@dataclass(frozen=True)
class CellConfig:
    """Radio parameters of one carrier, shared by codec, channel and engine."""

    bandwidth_rb: int = 52
    mu: int = 0
    rb_bandwidth_hz: float = 180e3
    noise_dbm: float = -100.0
    overhead_factor: float = 0.7
    max_spectral_efficiency: float = 7.4
    sensitivity_dbm: float = -110.0
    capture_margin_db: float = 3.0

    @property
    def slot_ms(self) -> float:
        return slot_duration_ms(self.mu)


REFERENCE_CELL = CellConfig(bandwidth_rb=52, mu=0)
