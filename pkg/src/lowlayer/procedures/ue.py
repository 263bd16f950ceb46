"""UE-side control state and its reaction to DCIs and MAC CEs.

Nothing here checks where a message came from: a decoded DCI or CE is acted
upon whether the BS or someone else sent it.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from ..codec.dci import DciKind, DciMessage
from ..codec.mac import (BeamFailureRecovery, CsiReportingActDeact, RecommendedBitRate,
                         ScellActDeact, Sdu, SpSrsActDeact, TimingAdvanceCmd)
from ..codec.sib import SibRaConfig
from ..core import UE_MAX_POWER_DBM, ResourceAllocation, clamp_tx_power
from .harq import HarqTracker
from .ra import RaPhase, RaState, RaTiming, ra_start

SCELL_CURRENT_INCREASE = 0.79
TPC_STEP_DB = {0: -1.0, 1: 0.0, 2: 1.0}
TPC_MAX_POWER = 3


class Traffic(enum.Enum):
    NONE = "None"
    FULL_BUFFER_UL = "FullBufferUl"
    FULL_BUFFER_DL = "FullBufferDl"


class CsiMode(enum.Enum):
    OFF = "Off"
    PERIODIC = "Periodic"
    SEMI_PERSISTENT = "SemiPersistent"


@dataclass
class CsiSchedule:
    mode: CsiMode = CsiMode.PERIODIC
    period_ms: float = 20.0
    active: bool = True

    @property
    def reporting(self) -> bool:
        if self.mode is CsiMode.OFF:
            return False
        return self.active or self.mode is CsiMode.PERIODIC


@dataclass
class UeState:
    rnti: int | None
    home_rnti: int = 0
    traffic: Traffic = Traffic.FULL_BUFFER_DL
    ra: RaState = field(default_factory=RaState)
    harq: HarqTracker = field(default_factory=HarqTracker)
    # active SCell index -> deactivation deadline (absolute slot, inf allowed)
    scells: dict = field(default_factory=dict)
    configured_scells: int = 0
    scell_timer_slots: float = math.inf
    active_bwp: int = 0
    csi_schedule: CsiSchedule = field(default_factory=CsiSchedule)
    srs_semipersistent_active: bool = False
    serving_beam_idx: int = 0
    ta_value: int = 0
    true_ta: int = 0
    ta_tolerance: int = 2
    tx_power_dbm: float = 0.0
    max_power_dbm: float = UE_MAX_POWER_DBM
    energy_units: float = 0.0
    radio_link_failed: bool = False
    sib: SibRaConfig = field(default_factory=SibRaConfig)
    sib_reread_pending: bool = False
    rbr_cap_kbps: int | None = None
    # grant-application delay for padding-only grants, counted from the first one
    padding_delay_slots: int = 0
    padding_first_grant: int | None = None

    def __post_init__(self):
        if not self.home_rnti and self.rnti is not None:
            self.home_rnti = self.rnti

    @property
    def connected(self) -> bool:
        return self.rnti is not None and not self.radio_link_failed

    @property
    def in_ra(self) -> bool:
        return self.ra.active

    @property
    def ul_synchronized(self) -> bool:
        return abs(self.ta_value - self.true_ta) <= self.ta_tolerance

    @property
    def active_scells(self) -> frozenset:
        return frozenset(self.scells)


@dataclass(frozen=True)
class UlTransmission:
    rnti: int
    slot: int
    alloc: ResourceAllocation
    tx_power_dbm: float
    padding: bool


@dataclass(frozen=True)
class StartedRa:
    contention_free: bool


def apply_tpc(ue: UeState, tpc: int) -> None:
    if tpc == TPC_MAX_POWER:
        ue.tx_power_dbm = ue.max_power_dbm
    else:
        ue.tx_power_dbm = clamp_tx_power(ue.tx_power_dbm + TPC_STEP_DB[tpc], ue.max_power_dbm)


def harq_on_assignment(ue: UeState, d: DciMessage, decode_ok: bool, now: int) -> UeState:
    if d.kind is not DciKind.DL_ASSIGNMENT:
        raise ValueError("HARQ accounting needs a DL assignment")
    ue.harq.on_assignment(d.dai, decode_ok, now + d.harq_feedback_timing)
    return ue


def ue_on_dci(ue: UeState, d: DciMessage, now: int, rng=None, timing: RaTiming = RaTiming(),
              pdsch_ok: bool = True):
    """React to a decoded DCI at slot ``now``; returns ``(ue, actions)``."""
    actions: list = []
    if ue.radio_link_failed or ue.rnti is None or d.rnti != ue.rnti:
        return ue, actions
    if d.kind is DciKind.PDCCH_ORDER:
        if not ue.in_ra:
            cfree = d.preamble_index != 0
            ra_start(ue, ue.sib, now, rng, timing, d.preamble_index if cfree else None)
            actions.append(StartedRa(cfree))
        return ue, actions
    if ue.in_ra:
        return ue, actions
    if d.kind is DciKind.BWP_SWITCH:
        ue.active_bwp = d.bwp_indicator
        return ue, actions
    if d.bwp_indicator != ue.active_bwp:
        # scheduled on a bandwidth part the UE is not monitoring
        if d.kind is DciKind.DL_ASSIGNMENT:
            harq_on_assignment(ue, d, False, now)
        return ue, actions
    if d.kind is DciKind.UL_GRANT:
        apply_tpc(ue, d.tpc)
        padding = ue.traffic is not Traffic.FULL_BUFFER_UL
        if padding:
            if ue.padding_first_grant is None:
                ue.padding_first_grant = now
            if now < ue.padding_first_grant + ue.padding_delay_slots:
                return ue, actions
        alloc = ResourceAllocation(d.alloc.start_rb, d.alloc.num_rb, d.alloc.direction)
        actions.append(UlTransmission(ue.rnti, now + d.k_offset, alloc, ue.tx_power_dbm, padding))
        return ue, actions
    harq_on_assignment(ue, d, pdsch_ok, now)
    return ue, actions


def apply_mac_ce(ue: UeState, ce, now: int):
    """Apply a decoded CE; returns ``(ue, bs_notified)`` where the BS is never told."""
    if isinstance(ce, ScellActDeact):
        wanted = {i for i in ce.active_indices() if i <= ue.configured_scells}
        for i in list(ue.scells):
            if i not in wanted:
                del ue.scells[i]
        for i in wanted:
            ue.scells[i] = now + ue.scell_timer_slots
    elif isinstance(ce, TimingAdvanceCmd):
        ue.ta_value = max(0, ue.ta_value + ce.ta - 31)
    elif isinstance(ce, SpSrsActDeact):
        ue.srs_semipersistent_active = ce.active
    elif isinstance(ce, CsiReportingActDeact):
        ue.csi_schedule.mode = CsiMode.SEMI_PERSISTENT
        ue.csi_schedule.active = ce.active
    elif isinstance(ce, RecommendedBitRate):
        ue.rbr_cap_kbps = ce.kbps
    elif isinstance(ce, (BeamFailureRecovery, Sdu)):
        pass
    else:
        raise TypeError(f"not a MAC CE: {ce!r}")
    return ue, False


def scell_tick(ue: UeState, now: int) -> list[int]:
    """Deactivate SCells whose timer ran out; returns their indices."""
    expired = [i for i, deadline in ue.scells.items() if now >= deadline]
    for i in expired:
        del ue.scells[i]
    return expired


def scell_activity(ue: UeState, index: int, now: int) -> None:
    if index in ue.scells:
        ue.scells[index] = now + ue.scell_timer_slots


def energy_tick(ue: UeState, dt_ms: float, base_current: float = 1.0) -> UeState:
    if dt_ms <= 0:
        raise ValueError("dt_ms must be positive")
    ue.energy_units += dt_ms * base_current * (1.0 + SCELL_CURRENT_INCREASE * len(ue.scells))
    return ue


def reconnected(ue: UeState, rnti: int) -> None:
    """Attach after a successful initial access."""
    ue.rnti = rnti
    ue.radio_link_failed = False
    ue.harq.clear()
    ue.active_bwp = 0
    ue.ra.phase = RaPhase.DONE
