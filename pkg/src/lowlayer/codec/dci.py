"""Downlink Control Information: bit layout, RNTI-masked CRC and blind decoding.

Layout (MSB first), identical size for every kind so one blind decode covers
all of them::

    identifier          2   0=UL grant, 1=DL assignment, 2=BWP switch
    freq. assignment    ceil(log2(N(N+1)/2))  RIV over the carrier's N RBs
    time offset (k0/k2) 4   slots after the PDCCH occasion
    hopping flag        1
    mcs                 5
    ndi                 1
    rv                  2
    harq process        4
    tpc                 2
    dai                 2
    harq feedback (k1)  3
    bwp indicator       2

A PDCCH order is a DL-identifier DCI whose frequency assignment is all ones;
its remaining 26 bits are preamble index (6), SSB index (6), PRACH mask (4)
and 10 reserved zero bits.  With N=52 RBs the payload is 39 bits; the 16-bit
CRC is appended, XOR-masked with the addressed RNTI.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from ..core import Direction, ResourceAllocation, check_rnti
from .bits import CRC_BITS, FieldOverflow, attach_crc, crc16, split_crc, uint

log = logging.getLogger(__name__)

GRANT_TAIL_BITS = 4 + 1 + 5 + 1 + 2 + 4 + 2 + 2 + 3 + 2
ORDER_TAIL_BITS = 6 + 6 + 4 + 10
assert GRANT_TAIL_BITS == ORDER_TAIL_BITS == 26


class NoMatch(Exception):
    """No candidate RNTI unmasks the CRC (or the payload is not a valid DCI)."""


class InvalidDci(NoMatch):
    """CRC matched but the payload violates the field layout."""


class AmbiguousMatch(Exception):
    pass


class DciKind(enum.Enum):
    UL_GRANT = "UlGrant"
    DL_ASSIGNMENT = "DlAssignment"
    PDCCH_ORDER = "PdcchOrder"
    BWP_SWITCH = "BwpSwitch"


_IDENTIFIER = {DciKind.UL_GRANT: 0, DciKind.DL_ASSIGNMENT: 1, DciKind.BWP_SWITCH: 2, DciKind.PDCCH_ORDER: 1}
_KIND_OF_ID = {0: DciKind.UL_GRANT, 1: DciKind.DL_ASSIGNMENT, 2: DciKind.BWP_SWITCH}


@dataclass(frozen=True)
class DciMessage:
    rnti: int
    kind: DciKind
    alloc: ResourceAllocation | None = None
    k_offset: int = 0
    freq_hopping: int = 0
    mcs: int = 0
    ndi: int = 0
    rv: int = 0
    harq_pid: int = 0
    tpc: int = 1
    dai: int = 0
    harq_feedback_timing: int = 0
    bwp_indicator: int = 0
    # PDCCH order only
    preamble_index: int = 0
    ssb_index: int = 0
    prach_mask: int = 0

    @property
    def direction(self) -> Direction:
        return Direction.UL if self.kind is DciKind.UL_GRANT else Direction.DL


def riv_bits(bandwidth_rb: int) -> int:
    return math.ceil(math.log2(bandwidth_rb * (bandwidth_rb + 1) // 2))


def payload_bits(bandwidth_rb: int) -> int:
    return 2 + riv_bits(bandwidth_rb) + GRANT_TAIL_BITS


def encode_riv(start_rb: int, num_rb: int, bandwidth_rb: int) -> int:
    """Resource indication value for a contiguous allocation (type-1 style)."""
    n = bandwidth_rb
    if num_rb < 1 or start_rb < 0 or start_rb + num_rb > n:
        raise FieldOverflow(f"allocation {start_rb}+{num_rb} exceeds {n} RBs")
    if num_rb - 1 <= n // 2:
        return n * (num_rb - 1) + start_rb
    return n * (n - num_rb + 1) + (n - 1 - start_rb)


def decode_riv(riv: int, bandwidth_rb: int) -> tuple[int, int]:
    n = bandwidth_rb
    length_m1, start = divmod(riv, n)
    if length_m1 + 1 + start <= n:
        num_rb = length_m1 + 1
    else:
        num_rb = n - length_m1 + 1
        start = n - 1 - start
    if num_rb < 1 or start < 0 or start + num_rb > n or encode_riv(start, num_rb, n) != riv:
        raise InvalidDci(f"RIV {riv} is not valid for {n} RBs")
    return start, num_rb


def encode_dci(d: DciMessage, bandwidth_rb: int) -> str:
    """Payload plus masked CRC as a bitstring of ``payload_bits(N) + 16`` bits."""
    return _encode_cached(d, bandwidth_rb)


@lru_cache(maxsize=8192)
def _encode_cached(d: DciMessage, bandwidth_rb: int) -> str:
    check_rnti(d.rnti)
    nriv = riv_bits(bandwidth_rb)
    head = uint(_IDENTIFIER[d.kind], 2, "identifier")
    if d.kind is DciKind.PDCCH_ORDER:
        if d.alloc is not None:
            raise FieldOverflow("a PDCCH order carries no allocation")
        grant_fields = (d.k_offset, d.freq_hopping, d.mcs, d.ndi, d.rv, d.harq_pid,
                        d.dai, d.harq_feedback_timing, d.bwp_indicator)
        if any(grant_fields) or d.tpc != 1:
            raise FieldOverflow("grant fields must keep their defaults in a PDCCH order")
        body = ("1" * nriv + uint(d.preamble_index, 6, "preamble_index")
                + uint(d.ssb_index, 6, "ssb_index") + uint(d.prach_mask, 4, "prach_mask") + "0" * 10)
    else:
        if d.alloc is None:
            raise FieldOverflow(f"{d.kind.value} requires an allocation")
        if d.alloc.direction is not d.direction:
            raise FieldOverflow("allocation direction does not match the DCI kind")
        if d.preamble_index or d.ssb_index or d.prach_mask:
            raise FieldOverflow("PDCCH order fields set on a grant")
        riv = encode_riv(d.alloc.start_rb, d.alloc.num_rb, bandwidth_rb)
        body = (uint(riv, nriv, "riv")
                + uint(d.k_offset, 4, "k_offset")
                + uint(d.freq_hopping, 1, "freq_hopping")
                + uint(d.mcs, 5, "mcs")
                + uint(d.ndi, 1, "ndi")
                + uint(d.rv, 2, "rv")
                + uint(d.harq_pid, 4, "harq_pid")
                + uint(d.tpc, 2, "tpc")
                + uint(d.dai, 2, "dai")
                + uint(d.harq_feedback_timing, 3, "harq_feedback_timing")
                + uint(d.bwp_indicator, 2, "bwp_indicator"))
    return attach_crc(head + body, d.rnti)


def unmask_rnti(bits: str) -> int:
    """RNTI that the CRC of ``bits`` was masked with (assuming it is a DCI)."""
    payload, crc = split_crc(bits)
    return crc ^ crc16(payload)


def decode_dci(bits: str, candidate_rntis: Iterable[int], bandwidth_rb: int) -> DciMessage:
    """Blind decode against a set of RNTIs.

    Raises :class:`NoMatch` when no candidate unmasks the CRC.  With a plain XOR
    mask a codeword unmasks to a single RNTI, so more than one match cannot
    happen; the lowest-RNTI rule is still applied should a caller pass
    duplicate-equivalent candidates.
    """
    if len(bits) != payload_bits(bandwidth_rb) + CRC_BITS:
        raise NoMatch(f"expected {payload_bits(bandwidth_rb) + CRC_BITS} bits, got {len(bits)}")
    rnti = unmask_rnti(bits)
    matches = sorted({r for r in candidate_rntis if r == rnti})
    if not matches:
        raise NoMatch("CRC does not unmask under any candidate RNTI")
    if len(matches) > 1:
        log.warning("ambiguous DCI match %s, using %#06x", matches, matches[0])
    return _parse_payload(bits[:-CRC_BITS], matches[0], bandwidth_rb)


@lru_cache(maxsize=8192)
def _parse_payload(payload: str, rnti: int, bandwidth_rb: int) -> DciMessage:
    nriv = riv_bits(bandwidth_rb)
    value = int(payload, 2)
    pos = len(payload)

    def take(width: int) -> int:
        nonlocal pos
        pos -= width
        return (value >> pos) & ((1 << width) - 1)

    ident = take(2)
    riv = take(nriv)
    if ident == 1 and riv == (1 << nriv) - 1:
        preamble, ssb, mask, reserved = take(6), take(6), take(4), take(10)
        if reserved:
            raise InvalidDci("reserved bits set in PDCCH order")
        return DciMessage(rnti, DciKind.PDCCH_ORDER, preamble_index=preamble, ssb_index=ssb, prach_mask=mask)
    if ident not in _KIND_OF_ID:
        raise InvalidDci(f"reserved identifier {ident}")
    kind = _KIND_OF_ID[ident]
    start, num = decode_riv(riv, bandwidth_rb)
    direction = Direction.UL if kind is DciKind.UL_GRANT else Direction.DL
    return DciMessage(
        rnti=rnti,
        kind=kind,
        alloc=ResourceAllocation(start, num, direction),
        k_offset=take(4),
        freq_hopping=take(1),
        mcs=take(5),
        ndi=take(1),
        rv=take(2),
        harq_pid=take(4),
        tpc=take(2),
        dai=take(2),
        harq_feedback_timing=take(3),
        bwp_indicator=take(2),
    )


def reference_ul_grant(rnti: int = 0x4601, tpc: int = 3, bandwidth_rb: int = 52) -> DciMessage:
    """Full-band UL grant at maximum TPC, as used by the induced-jamming attack."""
    return DciMessage(rnti, DciKind.UL_GRANT, ResourceAllocation(0, bandwidth_rb, Direction.UL), tpc=tpc)
