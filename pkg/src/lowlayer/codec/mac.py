"""MAC PDUs: one-octet R/F/LCID subheaders followed by CE or SDU payloads.

LCID assignments (single namespace for both directions):

====  ======================  ===========================================
LCID  element                 payload
====  ======================  ===========================================
1-32  SDU                     L field (8 bits, or 16 when F=1) + data
47    Recommended bit rate    2 octets, bit rate in kbit/s
50    SP SRS act/deact        1 octet: A/D(1) | SRS resource id(7)
51    Beam failure recovery   1 octet: R R | new beam index(6)
54    SP CSI reporting a/d    1 octet: R x7 | S(1)
58    SCell act/deact         1 octet: C7..C1 | R
61    Timing advance command  1 octet: TAG id(2) | TA(6)
63    Padding                 remainder of the PDU
====  ======================  ===========================================

Unknown LCIDs are errors rather than skipped, so an injected CE is never lost
silently.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .bits import FieldOverflow

LCID_RECOMMENDED_BIT_RATE = 47
LCID_SP_SRS = 50
LCID_BFR = 51
LCID_SP_CSI = 54
LCID_SCELL = 58
LCID_TA = 61
LCID_PADDING = 63
SDU_LCIDS = range(1, 33)


class MacDecodeError(ValueError):
    pass


class UnknownLcid(MacDecodeError):
    pass


class TruncatedPdu(MacDecodeError):
    pass


@dataclass(frozen=True)
class ScellActDeact:
    bitmap: int

    def active_indices(self) -> frozenset[int]:
        """SCell indices whose C_i bit is set (the R bit is ignored)."""
        return frozenset(i for i in range(1, 8) if self.bitmap >> i & 1)

    @classmethod
    def from_indices(cls, indices) -> "ScellActDeact":
        bitmap = 0
        for i in indices:
            if not 1 <= i <= 7:
                raise FieldOverflow(f"SCell index {i} outside 1..7")
            bitmap |= 1 << i
        return cls(bitmap)


@dataclass(frozen=True)
class TimingAdvanceCmd:
    tag_id: int
    ta: int


@dataclass(frozen=True)
class SpSrsActDeact:
    active: bool
    resource_id: int = 0


@dataclass(frozen=True)
class CsiReportingActDeact:
    active: bool


@dataclass(frozen=True)
class BeamFailureRecovery:
    new_beam_idx: int


@dataclass(frozen=True)
class RecommendedBitRate:
    kbps: int


@dataclass(frozen=True)
class Sdu:
    data: bytes
    lcid: int = 1


MacElement = Union[ScellActDeact, TimingAdvanceCmd, SpSrsActDeact, CsiReportingActDeact,
                   BeamFailureRecovery, RecommendedBitRate, Sdu]


@dataclass(frozen=True)
class MacPdu:
    elements: tuple = ()
    padding_bits: int = 0

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))


def _byte(value: int, name: str) -> int:
    if not 0 <= value <= 0xFF:
        raise FieldOverflow(f"{name}={value} does not fit in one octet")
    return value


def _subheader(lcid: int, f: int = 0) -> int:
    return (f << 6) | lcid


def encode_element(el) -> bytes:
    if isinstance(el, ScellActDeact):
        return bytes([_subheader(LCID_SCELL), _byte(el.bitmap, "bitmap")])
    if isinstance(el, TimingAdvanceCmd):
        if not 0 <= el.tag_id < 4 or not 0 <= el.ta < 64:
            raise FieldOverflow("TAG id is 2 bits and TA is 6 bits")
        return bytes([_subheader(LCID_TA), el.tag_id << 6 | el.ta])
    if isinstance(el, SpSrsActDeact):
        if not 0 <= el.resource_id < 128:
            raise FieldOverflow("SRS resource id is 7 bits")
        return bytes([_subheader(LCID_SP_SRS), int(el.active) << 7 | el.resource_id])
    if isinstance(el, CsiReportingActDeact):
        return bytes([_subheader(LCID_SP_CSI), int(el.active)])
    if isinstance(el, BeamFailureRecovery):
        if not 0 <= el.new_beam_idx < 64:
            raise FieldOverflow("beam index is 6 bits")
        return bytes([_subheader(LCID_BFR), el.new_beam_idx])
    if isinstance(el, RecommendedBitRate):
        if not 0 <= el.kbps < 1 << 16:
            raise FieldOverflow("bit rate is 16 bits")
        return bytes([_subheader(LCID_RECOMMENDED_BIT_RATE)]) + el.kbps.to_bytes(2, "big")
    if isinstance(el, Sdu):
        if el.lcid not in SDU_LCIDS:
            raise FieldOverflow(f"SDU LCID {el.lcid} outside 1..32")
        n = len(el.data)
        if n < 256:
            return bytes([_subheader(el.lcid), n]) + el.data
        if n < 1 << 16:
            return bytes([_subheader(el.lcid, 1)]) + n.to_bytes(2, "big") + el.data
        raise FieldOverflow("SDU longer than 65535 octets")
    raise TypeError(f"not a MAC element: {el!r}")


def encode_mac_pdu(pdu: MacPdu) -> bytes:
    out = b"".join(encode_element(el) for el in pdu.elements)
    if pdu.padding_bits:
        if pdu.padding_bits % 8:
            raise FieldOverflow("padding must be a whole number of octets")
        out += bytes([LCID_PADDING]) + bytes(pdu.padding_bits // 8 - 1)
    return out


def decode_mac_pdu(data: bytes) -> MacPdu:
    elements = []
    pos = 0
    n = len(data)

    def need(k: int) -> bytes:
        if pos + k > n:
            raise TruncatedPdu(f"need {k} octets at offset {pos}, have {n - pos}")
        return data[pos:pos + k]

    while pos < n:
        sub = data[pos]
        lcid, f = sub & 0x3F, sub >> 6 & 1
        pos += 1
        if lcid == LCID_PADDING:
            return MacPdu(tuple(elements), (n - pos + 1) * 8)
        if lcid in SDU_LCIDS:
            width = 2 if f else 1
            length = int.from_bytes(need(width), "big")
            pos += width
            elements.append(Sdu(bytes(need(length)), lcid))
            pos += length
            continue
        if lcid == LCID_RECOMMENDED_BIT_RATE:
            elements.append(RecommendedBitRate(int.from_bytes(need(2), "big")))
            pos += 2
            continue
        octet = need(1)[0]
        pos += 1
        if lcid == LCID_SCELL:
            elements.append(ScellActDeact(octet))
        elif lcid == LCID_TA:
            elements.append(TimingAdvanceCmd(octet >> 6, octet & 0x3F))
        elif lcid == LCID_SP_SRS:
            elements.append(SpSrsActDeact(bool(octet >> 7), octet & 0x7F))
        elif lcid == LCID_SP_CSI:
            elements.append(CsiReportingActDeact(bool(octet & 1)))
        elif lcid == LCID_BFR:
            elements.append(BeamFailureRecovery(octet & 0x3F))
        else:
            raise UnknownLcid(f"LCID {lcid} at offset {pos - 2}")
    return MacPdu(tuple(elements), 0)
