"""Small helpers for bitstrings and bitmasks.

Bitstrings are plain ``str`` objects over ``"0"``/``"1"``. Bit 0 of an n-bit
string is its leftmost character and the integer value is big-endian, so
``"011"`` is 3. Bitmasks over indices put index j at ``1 << j``.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Iterator


def ceil_log2(k: int) -> int:
    """ceil(log2 k) for k >= 1; 0 when k == 1."""
    if k < 1:
        raise ValueError(f"ceil_log2 needs k >= 1, got {k}")
    return (k - 1).bit_length()


def to_bits(value: int, width: int) -> str:
    if width == 0:
        if value:
            raise ValueError(f"{value} does not fit in 0 bits")
        return ""
    if value < 0 or value >= 1 << width:
        raise ValueError(f"{value} does not fit in {width} bits")
    return format(value, f"0{width}b")


def from_bits(bits: str) -> int:
    return int(bits, 2) if bits else 0


def is_bitstring(s: str) -> bool:
    return all(c in "01" for c in s)


def mask_of(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def members(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def gamma_encode(value: int) -> str:
    """Elias gamma code: (l - 1) zeros, then ``value`` in l bits."""
    if value < 1:
        raise ValueError(f"gamma code needs value >= 1, got {value}")
    body = format(value, "b")
    return "0" * (len(body) - 1) + body


def gamma_decode(bits: str, pos: int = 0) -> tuple[int, int] | None:
    """Read a gamma code at ``pos``; returns (value, next position) or None if truncated."""
    zeros = 0
    while pos + zeros < len(bits) and bits[pos + zeros] == "0":
        zeros += 1
    start = pos + zeros
    end = start + zeros + 1
    if end > len(bits):
        return None
    return int(bits[start:end], 2), end


def all_bitstrings(max_len: int, min_len: int = 0) -> Iterator[str]:
    """All bitstrings ordered by length, then numerically."""
    for length in range(min_len, max_len + 1):
        for combo in product("01", repeat=length):
            yield "".join(combo)


def count_bitstrings(max_len: int) -> int:
    return (1 << (max_len + 1)) - 1
