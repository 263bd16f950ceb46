"""Random access: UE attempt state machine and the BS preamble/RAR side.

Times are absolute slot counters from simulation start (no SFN wrap), so a
deadline compares with plain ``>``.  Durations configured in subframes are
scaled by ``2**mu`` slots.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from ..codec.sib import SibRaConfig
from ..core import clamp_tx_power


class RaPhase(enum.Enum):
    IDLE = "Idle"
    WAITING_RAR = "WaitingRar"
    WAITING_MSG4 = "WaitingMsg4"
    DONE = "Done"
    FAILED = "Failed"


class RaEvent(enum.Enum):
    MSG1 = "Msg1"
    RETRY = "Retry"
    FAILED = "Failed"
    MSG3 = "Msg3"
    DONE = "Done"


class RachOverload(RuntimeError):
    pass


@dataclass(frozen=True)
class RaTiming:
    """Pacing of attempts.  A retry goes out at the first PRACH occasion at
    least ``retry_gap_sf`` subframes after the window expired."""

    prach_period_sf: int = 10
    retry_gap_sf: int = 2
    msg3_delay_sf: int = 4
    msg4_delay_sf: int = 3
    contention_resolution_sf: int = 8
    mu: int = 0

    @property
    def spsf(self) -> int:
        return 1 << self.mu

    def next_occasion(self, slot: int) -> int:
        period = self.prach_period_sf * self.spsf
        return -(-slot // period) * period

    def attempt_bound_slots(self, window_sf: int) -> int:
        """Upper bound on the slots one failed attempt can take."""
        span = (3 + window_sf + 1 + self.retry_gap_sf) * self.spsf
        period = self.prach_period_sf * self.spsf
        return math.ceil(span / period) * period + period

    def liveness_bound_slots(self, cfg: SibRaConfig) -> int:
        return cfg.preamble_trans_max * self.attempt_bound_slots(cfg.ra_response_window_sf)


@dataclass
class RaState:
    phase: RaPhase = RaPhase.IDLE
    attempt: int = 0
    preamble: int = 0
    window_cfg: SibRaConfig = field(default_factory=SibRaConfig)
    contention_free: bool = False
    msg1_slot: int | None = None
    deadline: int | None = None
    msg4_deadline: int | None = None
    started_slot: int | None = None
    ended_slot: int | None = None
    attempts_total: int = 0

    @property
    def active(self) -> bool:
        return self.phase in (RaPhase.WAITING_RAR, RaPhase.WAITING_MSG4)


def _window_slots(cfg: SibRaConfig, timing: RaTiming) -> int:
    return (3 + cfg.ra_response_window_sf) * timing.spsf


def ra_start(ue, cfg: SibRaConfig, now: int, rng, timing: RaTiming = RaTiming(),
             preamble: int | None = None):
    """Begin RA with Msg1 at ``now``.  A given preamble means contention-free."""
    if ue.ra.active:
        raise ValueError("UE is already in random access")
    ra = RaState(window_cfg=cfg, started_slot=now)
    ra.contention_free = preamble is not None
    ra.preamble = preamble if preamble is not None else int(rng.integers(cfg.num_preambles))
    ra.phase = RaPhase.WAITING_RAR
    ra.attempt = 1
    ra.attempts_total = 0
    ra.msg1_slot = now
    ra.deadline = now + _window_slots(cfg, timing)
    ue.ra = ra
    return ue


def _fail_attempt(ue, now: int, rng, timing: RaTiming):
    ra = ue.ra
    cfg = ra.window_cfg
    if ra.attempt >= cfg.preamble_trans_max:
        ra.phase = RaPhase.FAILED
        ra.ended_slot = now
        ra.msg1_slot = ra.deadline = ra.msg4_deadline = None
        ue.radio_link_failed = True
        ue.rnti = None
        ue.scells.clear()
        return RaEvent.FAILED
    ra.attempt += 1
    ue.tx_power_dbm = clamp_tx_power(ue.tx_power_dbm + cfg.power_ramping_step_db, ue.max_power_dbm)
    if not ra.contention_free:
        ra.preamble = int(rng.integers(cfg.num_preambles))
    ra.phase = RaPhase.WAITING_RAR
    ra.msg1_slot = timing.next_occasion(now + timing.retry_gap_sf * timing.spsf)
    ra.deadline = ra.msg1_slot + _window_slots(cfg, timing)
    ra.msg4_deadline = None
    return RaEvent.RETRY


def ra_tick(ue, now: int, rng, timing: RaTiming = RaTiming()):
    """Advance timers at slot ``now``; returns ``(ue, event or None)``."""
    ra = ue.ra
    if ra.phase is RaPhase.WAITING_RAR:
        if now == ra.msg1_slot:
            ra.attempts_total += 1
            return ue, RaEvent.MSG1
        if now > ra.deadline:
            return ue, _fail_attempt(ue, now, rng, timing)
    elif ra.phase is RaPhase.WAITING_MSG4 and now > ra.msg4_deadline:
        return ue, _fail_attempt(ue, now, rng, timing)
    return ue, None


@dataclass(frozen=True)
class Rar:
    preamble: int
    msg1_slot: int
    ta: int
    msg3_slot: int
    contention_free: bool = False


def ue_on_rar(ue, rar: Rar, now: int, timing: RaTiming = RaTiming()):
    """Returns ``(ue, event)``: DONE for contention-free, MSG3 otherwise, None if ignored."""
    ra = ue.ra
    if (ra.phase is not RaPhase.WAITING_RAR or rar.preamble != ra.preamble
            or rar.msg1_slot != ra.msg1_slot or now > ra.deadline):
        return ue, None
    ue.ta_value = rar.ta
    if ra.contention_free:
        ra.phase = RaPhase.DONE
        ra.ended_slot = now
        return ue, RaEvent.DONE
    ra.phase = RaPhase.WAITING_MSG4
    ra.msg4_deadline = rar.msg3_slot + timing.contention_resolution_sf * timing.spsf
    return ue, RaEvent.MSG3


def ue_on_msg4(ue, won: bool, now: int, rng, timing: RaTiming = RaTiming()):
    if ue.ra.phase is not RaPhase.WAITING_MSG4:
        return ue, None
    if won:
        ue.ra.phase = RaPhase.DONE
        ue.ra.ended_slot = now
        return ue, RaEvent.DONE
    return ue, _fail_attempt(ue, now, rng, timing)


@dataclass
class RaResponder:
    """BS side: one RAR per (preamble, occasion); Msg4 to the lowest RNTI."""

    rtt_slots: int = 7
    msg3_delay_slots: int = 4
    max_rar_per_subframe: int = 8
    msg3_by_rar: dict = field(default_factory=dict)

    def on_preambles(self, preambles, now: int, ta_of=None, rtt_slots: int | None = None,
                     strict: bool = False):
        """``preambles`` is an iterable of ``(preamble, contention_free, sender)``.

        Returns ``(emission_slot, rars, dropped)``.  ``sender`` is only used to
        look up the timing advance.  Distinct preambles beyond capacity are
        dropped, or raise :class:`RachOverload` when ``strict``.
        """
        by_preamble: dict[int, list] = {}
        for pre, cfree, sender in preambles:
            by_preamble.setdefault(pre, []).append((cfree, sender))
        rtt = self.rtt_slots if rtt_slots is None else rtt_slots
        at = now + rtt
        rars = []
        for pre in sorted(by_preamble):
            cfree, sender = by_preamble[pre][0]
            ta = ta_of(sender) if ta_of else 0
            rars.append(Rar(pre, now, ta, at + self.msg3_delay_slots, cfree and len(by_preamble[pre]) == 1))
        dropped = rars[self.max_rar_per_subframe:]
        if dropped and strict:
            raise RachOverload(f"{len(rars)} preambles exceed {self.max_rar_per_subframe} RARs")
        return at, rars[:self.max_rar_per_subframe], len(dropped)

    def on_msg3(self, rar: Rar, rnti: int) -> None:
        self.msg3_by_rar.setdefault((rar.preamble, rar.msg1_slot), []).append(rnti)

    def resolve(self, rar: Rar) -> int | None:
        """Contention winner for a RAR (lowest RNTI), consuming the entry."""
        contenders = self.msg3_by_rar.pop((rar.preamble, rar.msg1_slot), [])
        return min(contenders) if contenders else None


def bs_on_preamble(responder: RaResponder, preamble: int, now: int, ta: int = 0,
                   contention_free: bool = False):
    """Single-preamble convenience wrapper; returns ``(emission_slot, Rar)``."""
    at, rars, _ = responder.on_preambles([(preamble, contention_free, None)], now, ta_of=lambda _s: ta)
    return at, rars[0]

