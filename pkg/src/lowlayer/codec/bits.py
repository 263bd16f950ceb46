"""Bitstring helpers and the 16-bit CRC shared by every codec.

Bitstrings are plain ``str`` objects of ``'0'``/``'1'`` characters, MSB first.
"""
from __future__ import annotations

import binascii

CRC_BITS = 16


class FieldOverflow(ValueError):
    pass


def uint(value: int, width: int, name: str = "field") -> str:
    if not 0 <= value < (1 << width):
        raise FieldOverflow(f"{name}={value} does not fit in {width} bits")
    return format(value, f"0{width}b") if width else ""


def check_bits(bits: str) -> None:
    if bits.strip("01"):
        raise ValueError("bitstring may contain only '0' and '1'")


def crc16(bits: str) -> int:
    """CRC-16/CCITT (poly 0x1021, zero init) over an arbitrary-length bitstring.

    Leading zero bits do not change a zero-init CRC, so the bits are left-padded
    to a byte boundary and handed to the C implementation in :mod:`binascii`.
    """
    if not bits:
        return 0
    n = len(bits)
    data = int(bits, 2).to_bytes((n + 7) // 8, "big")
    return binascii.crc_hqx(data, 0)


def attach_crc(payload: str, mask: int = 0) -> str:
    return payload + format(crc16(payload) ^ mask, "016b")


def split_crc(bits: str) -> tuple[str, int]:
    if len(bits) <= CRC_BITS:
        raise ValueError("bitstring shorter than its CRC")
    return bits[:-CRC_BITS], int(bits[-CRC_BITS:], 2)


def xor_bits(a: str, b: str) -> str:
    if len(a) != len(b):
        raise ValueError("length mismatch")
    if not a:
        return ""
    return format(int(a, 2) ^ int(b, 2), f"0{len(a)}b")


def bytes_to_bits(data: bytes) -> str:
    return "".join(format(b, "08b") for b in data)


def bits_to_bytes(bits: str) -> bytes:
    if len(bits) % 8:
        raise ValueError("bit length is not a multiple of 8")
    if not bits:
        return b""
    return int(bits, 2).to_bytes(len(bits) // 8, "big")
