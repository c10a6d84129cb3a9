"""A loop-free decision-clause language for brute-force instance complexity.

Every bitstring is a program. It decodes greedily into clauses

    kind (1) | operand | polarity (1) | out (2)

where kind 0 tests bit ``operand`` of y (ceil(log2 n) bits) and kind 1 asks
the oracle for f(x', y) with x' given literally (n bits). A clause matches
when the tested bit equals its polarity. The first matching clause fires and
outputs 00 -> ⊥, 01 -> 0, 10 -> 1, 11 -> ⊥. Bits left over after the last
complete clause are ignored but still count toward the program length.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

from . import settings
from .bits import all_bitstrings, ceil_log2, from_bits, to_bits
from .boolfun import BoolFunction, Oracle
from .witness import Mode, Out, as_mask, outputs_failure

logger = logging.getLogger(__name__)

OUT_CODES = {"00": Out.BOT, "01": Out.ZERO, "10": Out.ONE, "11": Out.BOT}


@dataclass(frozen=True)
class Clause:
    kind: int
    operand: int
    polarity: int
    out: Out

    def encode(self, n: int) -> str:
        width = ceil_log2(n) if self.kind == 0 else n
        code = {Out.BOT: "00", Out.ZERO: "01", Out.ONE: "10"}[self.out]
        return str(self.kind) + to_bits(self.operand, width) + str(self.polarity) + code


@dataclass(frozen=True)
class VmProgram:
    bits: str
    n: int
    clauses: tuple[Clause, ...]

    @classmethod
    def from_bits(cls, bits: str, n: int) -> "VmProgram":
        return cls(bits, n, decode_clauses(bits, n))

    def __len__(self) -> int:
        return len(self.bits)


def decode_clauses(bits: str, n: int) -> tuple[Clause, ...]:
    widths = (ceil_log2(n), n)
    clauses = []
    pos = 0
    while pos < len(bits):
        kind = int(bits[pos])
        end = pos + 1 + widths[kind] + 3
        if end > len(bits):
            break
        operand = from_bits(bits[pos + 1 : end - 3])
        polarity = int(bits[end - 3])
        clauses.append(Clause(kind, operand, polarity, OUT_CODES[bits[end - 2 : end]]))
        pos = end
    return tuple(clauses)


def vm_execute(p: VmProgram, y: int, oracle: Oracle) -> Out:
    n = p.n
    for clause in p.clauses:
        if clause.kind == 0:
            # Positions past n name no bit of y and never match.
            if clause.operand >= n:
                continue
            value = (y >> (n - 1 - clause.operand)) & 1
        else:
            value = oracle.query_index(clause.operand, y)
        if value == clause.polarity:
            return clause.out
    return Out.BOT


@lru_cache(maxsize=1 << 16)
def _outputs(clauses: tuple[Clause, ...], f: BoolFunction) -> tuple[int, int, int]:
    """(ones, zeros, bottoms) column masks of a decoded clause list."""
    program = VmProgram("", f.n, clauses)
    oracle = Oracle(f)
    ones = zeros = bottoms = 0
    for y in range(f.size):
        out = vm_execute(program, y, oracle)
        if out is Out.ONE:
            ones |= 1 << y
        elif out is Out.ZERO:
            zeros |= 1 << y
        else:
            bottoms |= 1 << y
    return ones, zeros, bottoms


def vm_corresponds(p: VmProgram, y: int, A, mode: Mode, f: BoolFunction) -> bool:
    # Clause lists are loop-free, so no run times out.
    ones, zeros, bottoms = _outputs(p.clauses, f)
    return outputs_failure(y, as_mask(A), mode, ones, zeros, bottoms) is None


@dataclass(frozen=True)
class VmIcResult:
    value_bits: int | None
    witness: VmProgram | None
    mode: Mode
    lmax: int
    model: str = "vm"

    @property
    def found(self) -> bool:
        return self.value_bits is not None

    def to_report(self) -> dict:
        return {
            "model": self.model,
            "mode": self.mode.value,
            "value_bits": self.value_bits,
            "witness_encoding": None if self.witness is None else "0b" + self.witness.bits,
            "lmax": self.lmax,
        }


def vm_ic(y: int, A, mode: Mode, f: BoolFunction, lmax: int | None = None) -> VmIcResult:
    """Shortest corresponding VM program of length <= lmax, by exhaustive search."""
    lmax = settings.VM_LMAX if lmax is None else lmax
    if not 0 <= lmax <= settings.VM_LMAX_CAP:
        raise ValueError(f"lmax must be in [0, {settings.VM_LMAX_CAP}], got {lmax}")
    A = as_mask(A)
    for bits in all_bitstrings(lmax):
        p = VmProgram.from_bits(bits, f.n)
        if vm_corresponds(p, y, A, mode, f):
            return VmIcResult(len(bits), p, mode, lmax)
    logger.debug("no VM program of length <= %s corresponds for y=%s in %s", lmax, y, f.label)
    return VmIcResult(None, None, mode, lmax)
