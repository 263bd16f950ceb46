"""BS-side view of its UEs: HARQ expectations, SCell and beam beliefs, RLF and inactivity."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..codec.dci import DciKind, DciMessage
from ..core import Direction, ResourceAllocation
from .harq import BsHarq, FeedbackResult
from .ra import RaResponder


class UnknownRnti(KeyError):
    pass


@dataclass
class BsUeContext:
    rnti: int
    harq: BsHarq = field(default_factory=BsHarq)
    scell_view: set = field(default_factory=set)
    beam_view: int = 0
    bwp: int = 0
    fail_since: int | None = None
    last_activity: int = 0
    pending_sr_grant: int | None = None


@dataclass
class BsState:
    connected: dict = field(default_factory=dict)
    responder: RaResponder = field(default_factory=RaResponder)
    rlf_slots: int = 2000
    inactivity_slots: int | None = None
    sr_grant_rb: int = 8
    sr_latency_slots: int = 2
    ul_k2: int = 4
    bandwidth_rb: int = 52
    rar_rtt_ms: float = 7.0

    def context(self, rnti: int) -> BsUeContext:
        try:
            return self.connected[rnti]
        except KeyError:
            raise UnknownRnti(rnti) from None

    def admit(self, rnti: int, now: int, beam: int = 0, scells=()) -> BsUeContext:
        ctx = BsUeContext(rnti, beam_view=beam, scell_view=set(scells), last_activity=now)
        self.connected[rnti] = ctx
        return ctx

    def release(self, rnti: int) -> None:
        self.connected.pop(rnti, None)


def _note_failure(bs: BsState, ctx: BsUeContext, now: int) -> bool:
    if ctx.fail_since is None:
        ctx.fail_since = now
    return now - ctx.fail_since >= bs.rlf_slots


def bs_on_ack_bitmap(bs: BsState, rnti: int, feedback_slot: int, bits, resource: int | None, now: int):
    """Returns ``(result, acked_payloads, rlf)``."""
    ctx = bs.context(rnti)
    result, acked = ctx.harq.on_bitmap(feedback_slot, tuple(bits), resource)
    if result is FeedbackResult.MATCHED:
        ctx.fail_since = None
        return result, acked, False
    return result, acked, _note_failure(bs, ctx, now)


def bs_on_missing_feedback(bs: BsState, rnti: int, feedback_slot: int, now: int) -> bool:
    """Feedback was due and nothing arrived; returns True when RLF is declared."""
    ctx = bs.context(rnti)
    ctx.harq.on_missing(feedback_slot)
    return _note_failure(bs, ctx, now)


def bs_on_sr(bs: BsState, rnti: int, now: int) -> DciMessage:
    """UL grant answering a scheduling request; also counts as activity."""
    ctx = bs.context(rnti)
    ctx.last_activity = now
    num = min(bs.sr_grant_rb, bs.bandwidth_rb)
    return DciMessage(rnti, DciKind.UL_GRANT, ResourceAllocation(0, num, Direction.UL), k_offset=bs.ul_k2)


def bs_on_bfr(bs: BsState, rnti: int, new_beam_idx: int) -> BsState:
    bs.context(rnti).beam_view = new_beam_idx
    return bs


def inactive_rntis(bs: BsState, now: int) -> list[int]:
    if bs.inactivity_slots is None:
        return []
    return sorted(r for r, c in bs.connected.items() if now - c.last_activity >= bs.inactivity_slots)
