from .bits import CRC_BITS, FieldOverflow, bits_to_bytes, bytes_to_bits, crc16
from .dci import (AmbiguousMatch, DciKind, DciMessage, InvalidDci, NoMatch, decode_dci,
                  encode_dci, payload_bits, reference_ul_grant, unmask_rnti)
from .hexdump import hexdump, hexdump_line, parse_hexdump
from .mac import (BeamFailureRecovery, CsiReportingActDeact, MacPdu, RecommendedBitRate,
                  ScellActDeact, Sdu, SpSrsActDeact, TimingAdvanceCmd, TruncatedPdu, UnknownLcid,
                  decode_mac_pdu, encode_mac_pdu)
from .scrambling import MitigationKeyContext, keystream, scramble_bytes, scramble_keyed
from .sib import IndexOutOfRange, SibRaConfig, decode_sib_ra, encode_sib_ra
from .uci import (AckBitmap, CsiReport, SchedulingRequest, decode_tb, decode_uci, encode_ack,
                  encode_csi, encode_sr, encode_tb)

__all__ = [
    "CRC_BITS",
    "FieldOverflow",
    "bits_to_bytes",
    "bytes_to_bits",
    "crc16",
    "AmbiguousMatch",
    "DciKind",
    "DciMessage",
    "InvalidDci",
    "NoMatch",
    "decode_dci",
    "encode_dci",
    "payload_bits",
    "reference_ul_grant",
    "unmask_rnti",
    "hexdump",
    "hexdump_line",
    "parse_hexdump",
    "BeamFailureRecovery",
    "CsiReportingActDeact",
    "MacPdu",
    "RecommendedBitRate",
    "ScellActDeact",
    "Sdu",
    "SpSrsActDeact",
    "TimingAdvanceCmd",
    "TruncatedPdu",
    "UnknownLcid",
    "decode_mac_pdu",
    "encode_mac_pdu",
    "MitigationKeyContext",
    "keystream",
    "scramble_bytes",
    "scramble_keyed",
    "IndexOutOfRange",
    "SibRaConfig",
    "decode_sib_ra",
    "encode_sib_ra",
    "AckBitmap",
    "CsiReport",
    "SchedulingRequest",
    "decode_tb",
    "decode_uci",
    "encode_ack",
    "encode_csi",
    "encode_sr",
    "encode_tb",
]
