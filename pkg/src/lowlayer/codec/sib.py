"""Random-access parameters broadcast in the SIB, as enum indices (14 bits)."""
from __future__ import annotations

from dataclasses import dataclass

from .bits import check_bits, uint

RA_RESPONSE_WINDOWS_SF = (2, 3, 4, 5, 6, 7, 8, 9, 10)
PREAMBLE_TRANS_MAX = (3, 4, 5, 6, 7, 8, 10, 20, 50, 100, 200)
POWER_RAMPING_STEPS_DB = (0, 2, 4, 6)
NUM_PREAMBLES = tuple(range(4, 65, 4))

SIB_RA_BITS = 4 + 4 + 2 + 4


class IndexOutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class SibRaConfig:
    ra_response_window_sf: int = 10
    preamble_trans_max: int = 10
    power_ramping_step_db: int = 2
    num_preambles: int = 64

    def __post_init__(self):
        for value, allowed, name in (
            (self.ra_response_window_sf, RA_RESPONSE_WINDOWS_SF, "ra_response_window_sf"),
            (self.preamble_trans_max, PREAMBLE_TRANS_MAX, "preamble_trans_max"),
            (self.power_ramping_step_db, POWER_RAMPING_STEPS_DB, "power_ramping_step_db"),
            (self.num_preambles, NUM_PREAMBLES, "num_preambles"),
        ):
            if value not in allowed:
                raise ValueError(f"{name}={value} not in {allowed}")

    def label(self) -> str:
        return f"sf{self.ra_response_window_sf}/n{self.preamble_trans_max}/dB{self.power_ramping_step_db}"


def encode_sib_ra(c: SibRaConfig) -> str:
    return (uint(RA_RESPONSE_WINDOWS_SF.index(c.ra_response_window_sf), 4)
            + uint(PREAMBLE_TRANS_MAX.index(c.preamble_trans_max), 4)
            + uint(POWER_RAMPING_STEPS_DB.index(c.power_ramping_step_db), 2)
            + uint(NUM_PREAMBLES.index(c.num_preambles), 4))


def decode_sib_ra(bits: str) -> SibRaConfig:
    check_bits(bits)
    if len(bits) != SIB_RA_BITS:
        raise ValueError(f"SIB RA block is {SIB_RA_BITS} bits, got {len(bits)}")
    fields = []
    pos = 0
    for width, table in ((4, RA_RESPONSE_WINDOWS_SF), (4, PREAMBLE_TRANS_MAX),
                         (2, POWER_RAMPING_STEPS_DB), (4, NUM_PREAMBLES)):
        idx = int(bits[pos:pos + width], 2)
        pos += width
        if idx >= len(table):
            raise IndexOutOfRange(f"index {idx} beyond {len(table)} entries")
        fields.append(table[idx])
    return SibRaConfig(*fields)
