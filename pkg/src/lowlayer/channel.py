"""Deterministic link model: received power, SINR, capture rule and capacity proxy."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable

from .core import REFERENCE_CELL, CellConfig, ResourceAllocation


def dbm_to_mw(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0)


def mw_to_dbm(mw: float) -> float:
    return 10.0 * math.log10(mw) if mw > 0 else -math.inf


@dataclass(frozen=True)
class LinkBudget:
    tx_power_dbm: float
    path_loss_db: float

    @property
    def rx_power_dbm(self) -> float:
        return self.tx_power_dbm - self.path_loss_db


@dataclass(frozen=True)
class SinrSample:
    signal_dbm: float
    interference_plus_noise_dbm: float

    @property
    def sinr_db(self) -> float:
        return self.signal_dbm - self.interference_plus_noise_dbm


def sinr(target_rx_dbm: float, interferers_dbm: Iterable[float] = (), noise_dbm: float = -100.0) -> SinrSample:
    # sorted so the float sum does not depend on interferer order
    total = math.fsum(sorted(dbm_to_mw(p) for p in interferers_dbm)) + dbm_to_mw(noise_dbm)
    return SinrSample(target_rx_dbm, mw_to_dbm(total))


class DecodeOutcome(enum.Enum):
    LEGIT = "LegitDecoded"
    SPOOF = "SpoofDecoded"
    COLLISION = "Collision"


def decode_outcome(legit_rx: float | None, spoof_rx: float | None, occupied: bool = True,
                   cell: CellConfig = REFERENCE_CELL) -> DecodeOutcome:
    """Capture rule with a symmetric margin and a collision dead zone.

    ``occupied=False`` means the resources carry no legitimate transmission,
    so ``legit_rx`` is ignored.  A lone signal below sensitivity decodes to
    nothing, reported as Collision.
    """
    if not occupied:
        legit_rx = None
    if legit_rx is None and spoof_rx is None:
        raise ValueError("at least one transmission must be present")
    margin = cell.capture_margin_db
    sens = cell.sensitivity_dbm
    if spoof_rx is None:
        return DecodeOutcome.LEGIT if legit_rx >= sens else DecodeOutcome.COLLISION
    if legit_rx is None:
        return DecodeOutcome.SPOOF if spoof_rx >= sens else DecodeOutcome.COLLISION
    if spoof_rx >= legit_rx + margin and spoof_rx >= sens:
        return DecodeOutcome.SPOOF
    if legit_rx >= spoof_rx + margin and legit_rx >= sens:
        return DecodeOutcome.LEGIT
    return DecodeOutcome.COLLISION


def spectral_efficiency(sinr_db: float, cell: CellConfig = REFERENCE_CELL) -> float:
    if sinr_db == -math.inf:
        return 0.0
    return min(math.log2(1.0 + 10.0 ** (sinr_db / 10.0)), cell.max_spectral_efficiency)


def throughput_mbps(alloc: ResourceAllocation | int, sinr_db: float, cell: CellConfig = REFERENCE_CELL) -> float:
    num_rb = alloc if isinstance(alloc, int) else alloc.num_rb
    if num_rb < 1:
        raise ValueError("num_rb must be >= 1")
    return num_rb * cell.rb_bandwidth_hz * spectral_efficiency(sinr_db, cell) * cell.overhead_factor / 1e6


def sinr_for_rate(mbps: float, num_rb: int, cell: CellConfig = REFERENCE_CELL) -> float:
    """SINR (dB) at which ``num_rb`` RBs carry ``mbps``; inverse of :func:`throughput_mbps`."""
    se = mbps * 1e6 / (num_rb * cell.rb_bandwidth_hz * cell.overhead_factor)
    if se >= cell.max_spectral_efficiency:
        raise ValueError("rate exceeds the spectral-efficiency cap")
    return 10.0 * math.log10(2.0 ** se - 1.0)
