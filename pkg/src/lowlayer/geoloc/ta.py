"""Timing advance to distance.

One TA increment is 16*64*T_c / 2**mu seconds of round trip.  At mu=3 the
field-calibrated value of 9.77 m per step is used; other numerologies scale
it by 2**(3-mu).  :func:`physical_step_m` gives the constant-derived value
for cross-checking (it differs by about 0.1%).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

SPEED_OF_LIGHT = 299_792_458.0
T_C = 1.0 / (480_000 * 4096)
TA_MAX = 3846
STEP_MU3_M = 9.77


@dataclass(frozen=True)
class TimingAdvance:
    ta: int
    mu: int = 3

    def __post_init__(self):
        if not 0 <= self.ta <= TA_MAX:
            raise ValueError(f"TA {self.ta} outside 0..{TA_MAX}")


def ta_step_m(mu: int = 3) -> float:
    return STEP_MU3_M * 8 / (1 << mu)


def physical_step_m(mu: int = 3) -> float:
    return SPEED_OF_LIGHT * 16 * 64 * T_C / (1 << mu) / 2


def ta_to_distance_range(ta: TimingAdvance) -> tuple[float, float]:
    step = ta_step_m(ta.mu)
    return step * max(ta.ta - 1, 0), step * ta.ta


def distance_to_ta(distance_m: float, mu: int = 3) -> int:
    """Smallest TA whose range reaches ``distance_m``."""
    if distance_m <= 0:
        return 0
    return min(TA_MAX, math.ceil(distance_m / ta_step_m(mu) - 1e-9))
