"""HARQ-ACK codebook bookkeeping driven by the 2-bit DAI counter.

Both ends key their state by the feedback slot an assignment points at.  The
UE sizes its bitmap from the DAI sequence it saw, inserting NACKs for gaps.
The PUCCH resource the bitmap travels on is selected by the DAI of the last
assignment the UE received, which lets the BS recognise trailing misses: it
accepts the bitmap when its length matches a sent assignment whose DAI equals
that resource index.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

DAI_MODULO = 4


@dataclass(frozen=True)
class HarqEntry:
    dai: int | None  # None for an inferred (missed) assignment
    ack: bool


@dataclass
class HarqTracker:
    """UE side: per feedback slot, the expected DAI and the pending bits."""

    expected: dict = field(default_factory=dict)
    pending: dict = field(default_factory=dict)
    last_dai: dict = field(default_factory=dict)

    def ue_dai_expected(self, feedback_slot: int) -> int:
        return self.expected.get(feedback_slot, 0)

    def on_assignment(self, dai: int, decode_ok: bool, feedback_slot: int) -> list[HarqEntry]:
        if not 0 <= dai < DAI_MODULO:
            raise ValueError("DAI is a 2-bit counter")
        exp = self.expected.get(feedback_slot, 0)
        gap = (dai - exp) % DAI_MODULO
        entries = self.pending.setdefault(feedback_slot, [])
        entries.extend(HarqEntry(None, False) for _ in range(gap))
        entries.append(HarqEntry(dai, bool(decode_ok)))
        self.expected[feedback_slot] = (dai + 1) % DAI_MODULO
        self.last_dai[feedback_slot] = dai
        return entries

    def bitmap(self, feedback_slot: int) -> tuple[bool, ...]:
        return tuple(e.ack for e in self.pending.get(feedback_slot, ()))

    def pop_feedback(self, feedback_slot: int):
        """``(bits, pucch_resource)`` due at this slot, or None when nothing was received."""
        entries = self.pending.pop(feedback_slot, None)
        self.expected.pop(feedback_slot, None)
        resource = self.last_dai.pop(feedback_slot, None)
        if not entries:
            return None
        return tuple(e.ack for e in entries), resource

    def clear(self) -> None:
        self.expected.clear()
        self.pending.clear()
        self.last_dai.clear()


class FeedbackResult(enum.Enum):
    MATCHED = "Matched"
    HARQ_FAILURE = "HarqFailure"


@dataclass
class BsHarq:
    """BS side: what was sent towards each feedback slot."""

    sent: dict = field(default_factory=dict)

    def next_dai(self, feedback_slot: int) -> int:
        return len(self.sent.get(feedback_slot, ())) % DAI_MODULO

    def on_assignment(self, feedback_slot: int, payload: Any = None) -> int:
        dai = self.next_dai(feedback_slot)
        self.sent.setdefault(feedback_slot, []).append((dai, payload))
        return dai

    def bs_expected_bits(self, feedback_slot: int, resource: int | None = None) -> int:
        """Bitmap length the BS can accept; with a resource index, the longest
        prefix ending on an assignment with that DAI."""
        sent = self.sent.get(feedback_slot, ())
        if resource is None:
            return len(sent)
        for pos in range(len(sent) - 1, -1, -1):
            if sent[pos][0] == resource:
                return pos + 1
        return 0

    def acceptable_lengths(self, feedback_slot: int, resource: int) -> set[int]:
        sent = self.sent.get(feedback_slot, ())
        return {pos + 1 for pos, (dai, _) in enumerate(sent) if dai == resource}

    def expects(self, feedback_slot: int) -> bool:
        return bool(self.sent.get(feedback_slot))

    def on_bitmap(self, feedback_slot: int, bits, resource: int | None):
        """Returns ``(result, acked_payloads)`` and forgets the slot."""
        sent = self.sent.pop(feedback_slot, [])
        n = len(bits)
        ok = n == len(sent) if resource is None else n in {
            pos + 1 for pos, (dai, _) in enumerate(sent) if dai == resource}
        if not ok:
            return FeedbackResult.HARQ_FAILURE, []
        return FeedbackResult.MATCHED, [sent[i][1] for i in range(n) if bits[i]]

    def on_missing(self, feedback_slot: int) -> list:
        return self.sent.pop(feedback_slot, [])

    def clear(self) -> None:
        self.sent.clear()
