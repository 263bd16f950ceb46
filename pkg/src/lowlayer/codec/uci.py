"""Uplink control payloads (SR, HARQ-ACK bitmap, CSI report) and transport-block CRC.

UCI is carried as a plaintext record: a 2-bit kind, the payload, and a 16-bit
CRC masked with the sender's RNTI, so anyone listening on PUCCH can attribute
a report to its RNTI.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..core import SlotTime, check_rnti
from .bits import FieldOverflow, attach_crc, check_bits, crc16, split_crc, uint
from .dci import NoMatch

RSRP_MIN_DBM = -156
RSRP_MAX_DBM = -31
ACK_LEN_BITS = 5
MAX_ACK_BITS = (1 << ACK_LEN_BITS) - 1

_KIND_SR, _KIND_ACK, _KIND_CSI = 0, 1, 2


@dataclass(frozen=True)
class CsiReport:
    rnti: int
    beam_idx: int
    rsrp_dbm: float
    t: SlotTime | None = None

    def __post_init__(self):
        if not RSRP_MIN_DBM <= self.rsrp_dbm <= RSRP_MAX_DBM:
            raise ValueError(f"RSRP {self.rsrp_dbm} dBm outside [{RSRP_MIN_DBM}, {RSRP_MAX_DBM}]")


@dataclass(frozen=True)
class AckBitmap:
    bits: tuple  # True = ACK
    t: SlotTime | None = None

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(bool(b) for b in self.bits))


@dataclass(frozen=True)
class SchedulingRequest:
    rnti: int
    t: SlotTime | None = None


def quantize_rsrp(rsrp_dbm: float) -> int:
    return int(round(min(max(rsrp_dbm, RSRP_MIN_DBM), RSRP_MAX_DBM))) - RSRP_MIN_DBM


def encode_csi(r: CsiReport) -> str:
    check_rnti(r.rnti)
    payload = uint(_KIND_CSI, 2) + uint(r.beam_idx, 6, "beam_idx") + uint(quantize_rsrp(r.rsrp_dbm), 7, "rsrp")
    return attach_crc(payload, r.rnti)


def encode_ack(a: AckBitmap, rnti: int) -> str:
    if not 1 <= len(a.bits) <= MAX_ACK_BITS:
        raise FieldOverflow(f"ACK bitmap length {len(a.bits)} outside 1..{MAX_ACK_BITS}")
    payload = uint(_KIND_ACK, 2) + uint(len(a.bits), ACK_LEN_BITS) + "".join("1" if b else "0" for b in a.bits)
    return attach_crc(payload, check_rnti(rnti))


def encode_sr(sr: SchedulingRequest) -> str:
    return attach_crc(uint(_KIND_SR, 2), check_rnti(sr.rnti))


def decode_uci(bits: str, candidate_rntis, t: SlotTime | None = None):
    """Returns ``(rnti, record)``; raises NoMatch when no candidate unmasks the CRC."""
    check_bits(bits)
    payload, crc = split_crc(bits)
    rnti = crc ^ crc16(payload)
    if rnti not in set(candidate_rntis):
        raise NoMatch("UCI CRC does not unmask under any candidate RNTI")
    kind = int(payload[:2], 2)
    body = payload[2:]
    if kind == _KIND_SR and not body:
        return rnti, SchedulingRequest(rnti, t)
    if kind == _KIND_ACK and len(body) > ACK_LEN_BITS:
        n = int(body[:ACK_LEN_BITS], 2)
        if n >= 1 and len(body) == ACK_LEN_BITS + n:
            return rnti, AckBitmap(tuple(c == "1" for c in body[ACK_LEN_BITS:]), t)
    if kind == _KIND_CSI and len(body) == 13:
        rsrp = int(body[6:], 2) + RSRP_MIN_DBM
        if rsrp <= RSRP_MAX_DBM:
            return rnti, CsiReport(rnti, int(body[:6], 2), float(rsrp), t)
    raise NoMatch("malformed UCI payload")


def encode_tb(data_bits: str) -> str:
    """Transport block with an unmasked CRC."""
    return attach_crc(data_bits, 0)


def decode_tb(bits: str) -> str:
    payload, crc = split_crc(bits)
    if crc16(payload) != crc:
        raise NoMatch("transport block CRC failure")
    return payload
