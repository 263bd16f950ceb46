"""Keyed PHY scrambling used as the countermeasure.

The keystream is HMAC-SHA256 in counter mode over (SFN, subframe, start RB,
block counter), so it behaves like a block cipher in CTR mode keyed by K_PHY.
"""
from __future__ import annotations

import hashlib
import hmac
import struct
from dataclasses import dataclass

from .bits import check_bits, xor_bits


@dataclass(frozen=True)
class MitigationKeyContext:
    key: bytes
    sfn: int = 0
    subframe: int = 0
    start_rb: int = 0


def keystream(ctx: MitigationKeyContext, n_bits: int) -> str:
    out = bytearray()
    counter = 0
    while len(out) * 8 < n_bits:
        msg = struct.pack(">HBHI", ctx.sfn, ctx.subframe, ctx.start_rb, counter)
        out += hmac.new(ctx.key, msg, hashlib.sha256).digest()
        counter += 1
    return "".join(format(b, "08b") for b in out)[:n_bits]


def scramble_keyed(bits: str, ctx: MitigationKeyContext) -> str:
    check_bits(bits)
    return xor_bits(bits, keystream(ctx, len(bits)))


def scramble_bytes(data: bytes, ctx: MitigationKeyContext) -> bytes:
    ks = keystream(ctx, len(data) * 8)
    return bytes(b ^ int(ks[8 * i:8 * i + 8], 2) for i, b in enumerate(data))
