"""``<label> <hex>`` lines for golden files.

Bitstrings whose length is not a multiple of 8 are left-padded with zeros and
the label gets a ``/<nbits>`` suffix so the dump stays reversible.
"""
from __future__ import annotations


def to_hex(data) -> tuple[str, int | None]:
    if isinstance(data, (bytes, bytearray)):
        return data.hex(), None
    n = len(data)
    width = (n + 7) // 8
    hexed = int(data, 2).to_bytes(width, "big").hex() if n else ""
    return hexed, (n if n % 8 else None)


def hexdump_line(label: str, data) -> str:
    if " " in label:
        raise ValueError("label must not contain spaces")
    hexed, nbits = to_hex(data)
    return f"{label}/{nbits} {hexed}" if nbits is not None else f"{label} {hexed}"


def hexdump(items) -> str:
    return "".join(hexdump_line(label, data) + "\n" for label, data in items)


def parse_hexdump(text: str) -> list[tuple[str, str]]:
    """Inverse of :func:`hexdump`; every entry comes back as a bitstring."""
    out = []
    for line in text.splitlines():
        if not line.strip():
            continue
        label, hexed = (line.split(" ", 1) + [""])[:2]
        raw = bytes.fromhex(hexed.strip())
        bits = "".join(format(b, "08b") for b in raw)
        if "/" in label:
            label, nbits = label.rsplit("/", 1)
            bits = bits[len(bits) - int(nbits):]
        out.append((label, bits))
    return out
