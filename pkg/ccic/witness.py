"""Structured witness programs.

A witness is a tiny program over Bob's input y with read access to the
description of f. Programs travel as bitstrings: a 2-bit family tag followed
by a family payload.

    00 RECT1     index into the canonical 1-cover, ceil(log2 m') bits
    01 RECT2     index into the combined sequence, ceil(log2(m + m')) bits
    10 BITTEST   bit position (ceil(log2 n) bits) then the reference bit b
    11 CONSTBOT  the string "11" exactly
    11 COMBINE   any longer string with tag 11, laid out as

        11 | s | gamma(L) | first component (L bits) | other component

    The first component is the shorter of (p, p'), p on ties; s = 0 when it
    is p and s = 1 when it is p'. Any other order bit is invalid.

Decoding always consumes the whole string: trailing bits, short payloads and
out-of-range indices make the guess invalid.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Union

from .bits import ceil_log2, from_bits, gamma_decode, gamma_encode, is_bitstring, mask_of, members, to_bits
from .boolfun import BoolFunction, Oracle
from .covers import CombinedSequence, Cover, min_cover

logger = logging.getLogger(__name__)

COMBINE_OVERHEAD = 1


class Family(Enum):
    RECT1 = "00"
    RECT2 = "01"
    BITTEST = "10"
    CONSTBOT = "11"
    COMBINE = "11+"

    @property
    def tag(self) -> str:
        return self.value[:2]


ALL_FAMILIES = frozenset(Family)
BITTEST_FAMILIES = frozenset({Family.BITTEST, Family.CONSTBOT})


class Out(Enum):
    ZERO = "0"
    ONE = "1"
    BOT = "⊥"

    @classmethod
    def of_color(cls, z: int) -> "Out":
        return cls.ONE if z else cls.ZERO


class Mode(Enum):
    YES = "yes"
    NO = "no"
    TWO = "two"

    @property
    def alphabet(self) -> frozenset[Out]:
        if self is Mode.YES:
            return frozenset({Out.ONE, Out.BOT})
        if self is Mode.NO:
            return frozenset({Out.ZERO, Out.BOT})
        return frozenset(Out)


# -------------------------------
# Programs
# -------------------------------
@dataclass(frozen=True)
class Rect1:
    i: int
    family = Family.RECT1

    def __str__(self) -> str:
        return f"RECT1{{i={self.i}}}"


@dataclass(frozen=True)
class Rect2:
    i: int
    family = Family.RECT2

    def __str__(self) -> str:
        return f"RECT2{{i={self.i}}}"


@dataclass(frozen=True)
class BitTest:
    i: int
    b: int
    family = Family.BITTEST

    def __str__(self) -> str:
        return f"BITTEST{{i={self.i},b={self.b}}}"


@dataclass(frozen=True)
class ConstBot:
    family = Family.CONSTBOT

    def __str__(self) -> str:
        return "CONSTBOT"


@dataclass(frozen=True)
class Combine:
    """1 if p(y) = 1, else 0 if q(y) = 0, else ⊥."""

    p: "Program"
    q: "Program"
    family = Family.COMBINE

    def __str__(self) -> str:
        return f"COMBINE({self.p}, {self.q})"


Program = Union[Rect1, Rect2, BitTest, ConstBot, Combine]


@dataclass(frozen=True)
class InvalidGuess:
    reason: str

    def __bool__(self) -> bool:
        return False

    def __str__(self) -> str:
        return f"invalid guess: {self.reason}"


# -------------------------------
# Context
# -------------------------------
class ProgramContext:
    """A function together with its canonical covers, computed on first use."""

    def __init__(self, f: BoolFunction):
        self.f = f

    @property
    def n(self) -> int:
        return self.f.n

    @property
    def size(self) -> int:
        return self.f.size

    @cached_property
    def one_cover(self) -> Cover:
        return min_cover(self.f, 1)

    @cached_property
    def zero_cover(self) -> Cover:
        return min_cover(self.f, 0)

    @cached_property
    def sequence(self) -> CombinedSequence:
        return CombinedSequence(self.zero_cover, self.one_cover)

    @property
    def m0(self) -> int:
        return self.zero_cover.m

    @property
    def m1(self) -> int:
        return self.one_cover.m

    @property
    def bit_width(self) -> int:
        return ceil_log2(self.n)

    def base_programs(self, families: Iterable[Family] = ALL_FAMILIES) -> list[Program]:
        """Every non-COMBINE program valid here, restricted to ``families``."""
        families = frozenset(families)
        out: list[Program] = []
        if Family.RECT1 in families:
            out.extend(Rect1(i) for i in range(self.m1))
        if Family.RECT2 in families:
            out.extend(Rect2(i) for i in range(self.m0 + self.m1))
        if Family.BITTEST in families:
            out.extend(BitTest(i, b) for i in range(self.n) for b in (0, 1))
        if Family.CONSTBOT in families:
            out.append(ConstBot())
        return out

    def __repr__(self) -> str:
        return f"ProgramContext({self.f.label})"


@lru_cache(maxsize=256)
def context_for(f: BoolFunction) -> ProgramContext:
    return ProgramContext(f)


# -------------------------------
# Codec
# -------------------------------
def encode(p: Program, ctx: ProgramContext) -> str:
    if isinstance(p, Rect1):
        if not 0 <= p.i < ctx.m1:
            raise ValueError(f"{p} out of range for m'={ctx.m1}")
        return "00" + to_bits(p.i, ceil_log2(ctx.m1))
    if isinstance(p, Rect2):
        total = ctx.m0 + ctx.m1
        if not 0 <= p.i < total:
            raise ValueError(f"{p} out of range for m+m'={total}")
        return "01" + to_bits(p.i, ceil_log2(total))
    if isinstance(p, BitTest):
        if not 0 <= p.i < ctx.n or p.b not in (0, 1):
            raise ValueError(f"{p} out of range for n={ctx.n}")
        return "10" + to_bits(p.i, ctx.bit_width) + str(p.b)
    if isinstance(p, ConstBot):
        return "11"
    if isinstance(p, Combine):
        ep, eq = encode(p.p, ctx), encode(p.q, ctx)
        if len(ep) <= len(eq):
            order, first, rest = "0", ep, eq
        else:
            order, first, rest = "1", eq, ep
        return "11" + order + gamma_encode(len(first)) + first + rest
    raise TypeError(f"not a witness program: {p!r}")


def bit_length(p: Program, ctx: ProgramContext) -> int:
    return len(encode(p, ctx))


def decode_guess(
    bits: str, ctx: ProgramContext, allowed: Iterable[Family] = ALL_FAMILIES
) -> Program | InvalidGuess:
    """Decode a guess, or return an InvalidGuess (falsy) naming the problem."""
    if not is_bitstring(bits):
        return InvalidGuess("not a bitstring")
    return _decode(bits, ctx, frozenset(allowed))


def _decode(bits: str, ctx: ProgramContext, allowed: frozenset[Family]) -> Program | InvalidGuess:
    if len(bits) < 2:
        return InvalidGuess("truncated tag")
    tag, body = bits[:2], bits[2:]
    if tag == "11":
        family = Family.CONSTBOT if not body else Family.COMBINE
    else:
        family = Family(tag)
    if family not in allowed:
        return InvalidGuess(f"{family.name} guesses are not accepted here")

    if family is Family.CONSTBOT:
        return ConstBot()
    if family is Family.RECT1:
        if ctx.m1 == 0:
            return InvalidGuess("f has no 1-cells")
        return _decode_index(body, ctx.m1, Rect1)
    if family is Family.RECT2:
        return _decode_index(body, ctx.m0 + ctx.m1, Rect2)
    if family is Family.BITTEST:
        width = ctx.bit_width
        if len(body) != width + 1:
            return InvalidGuess(f"BITTEST payload must be {width + 1} bits, got {len(body)}")
        i = from_bits(body[:width])
        if i >= ctx.n:
            return InvalidGuess(f"bit position {i} out of range for n={ctx.n}")
        return BitTest(i, int(body[width]))

    order = body[0]
    read = gamma_decode(body, 1)
    if read is None:
        return InvalidGuess("truncated COMBINE length")
    length, pos = read
    if pos + length > len(body):
        return InvalidGuess("truncated COMBINE component")
    first, rest = body[pos : pos + length], body[pos + length :]
    if order == "0" and len(first) > len(rest):
        return InvalidGuess("non-canonical COMBINE order")
    if order == "1" and len(first) >= len(rest):
        return InvalidGuess("non-canonical COMBINE order")
    a = _decode(first, ctx, allowed)
    if not a:
        return a
    b = _decode(rest, ctx, allowed)
    if not b:
        return b
    return Combine(a, b) if order == "0" else Combine(b, a)


def _decode_index(body: str, count: int, cls) -> Program | InvalidGuess:
    width = ceil_log2(count)
    if len(body) != width:
        return InvalidGuess(f"{cls.family.name} payload must be {width} bits, got {len(body)}")
    i = from_bits(body)
    if i >= count:
        return InvalidGuess(f"index {i} out of range for {count} rectangles")
    return cls(i)


# -------------------------------
# Execution
# -------------------------------
@dataclass(frozen=True)
class ExecutionResult:
    output: Out | None
    steps: int
    timed_out: bool = False


class _TimedOut(Exception):
    pass


class _Clock:
    def __init__(self, budget: int | None):
        self.budget = budget
        self.steps = 0

    def tick(self, k: int = 1) -> None:
        self.steps += k
        if self.budget is not None and self.steps > self.budget:
            raise _TimedOut


def execute(p: Program, y: int, oracle: Oracle, budget: int | None = None) -> ExecutionResult:
    """Run p on column y; ``budget=None`` runs unbounded."""
    if not 0 <= y < 1 << oracle.n:
        raise ValueError(f"column {y} out of range for n={oracle.n}")
    clock = _Clock(budget)
    try:
        out = _run(p, y, oracle, clock)
    except _TimedOut:
        return ExecutionResult(None, clock.steps, timed_out=True)
    return ExecutionResult(out, clock.steps)


def _read_covers(oracle: Oracle, clock: _Clock) -> ProgramContext:
    before = oracle.queries
    g = oracle.read_table()
    clock.tick(oracle.queries - before)
    return context_for(g)


def _run(p: Program, y: int, oracle: Oracle, clock: _Clock) -> Out:
    if isinstance(p, ConstBot):
        return Out.BOT
    if isinstance(p, BitTest):
        clock.tick()
        bit = (y >> (oracle.n - 1 - p.i)) & 1
        return Out.ONE if bit != p.b else Out.BOT
    if isinstance(p, Rect1):
        cover = _read_covers(oracle, clock).one_cover
        clock.tick()
        if p.i >= cover.m:
            return Out.BOT
        return Out.ONE if cover[p.i].cols >> y & 1 else Out.BOT
    if isinstance(p, Rect2):
        seq = _read_covers(oracle, clock).sequence
        clock.tick()
        if p.i >= len(seq):
            return Out.BOT
        rect = seq[p.i]
        return Out.of_color(rect.color) if rect.cols >> y & 1 else Out.BOT
    if isinstance(p, Combine):
        clock.tick(COMBINE_OVERHEAD)
        if _run(p.p, y, oracle, clock) is Out.ONE:
            return Out.ONE
        if _run(p.q, y, oracle, clock) is Out.ZERO:
            return Out.ZERO
        return Out.BOT
    raise TypeError(f"not a witness program: {p!r}")


# -------------------------------
# Profiles and predicates
# -------------------------------
@dataclass(frozen=True)
class Profile:
    """Behaviour of a program on every column under a budget (None = unbounded)."""

    outputs: tuple[Out | None, ...]
    steps: tuple[int, ...]
    ones: int
    zeros: int
    bottoms: int
    timeouts: int

    @property
    def total(self) -> bool:
        return not self.timeouts

    @property
    def max_steps(self) -> int:
        return max(self.steps, default=0)

    @property
    def decided(self) -> int:
        return self.ones | self.zeros


@lru_cache(maxsize=1 << 16)
def _unbounded_runs(p: Program, ctx: ProgramContext) -> tuple[tuple[Out, int], ...]:
    runs = []
    for y in range(ctx.size):
        result = execute(p, y, Oracle(ctx.f))
        runs.append((result.output, result.steps))
    return tuple(runs)


@lru_cache(maxsize=1 << 16)
def profile(p: Program, ctx: ProgramContext, budget: int | None = None) -> Profile:
    # A budget only cuts runs short, so outcomes follow from the unbounded step counts.
    outputs, steps = [], []
    ones = zeros = bottoms = timeouts = 0
    for y, (out, used) in enumerate(_unbounded_runs(p, ctx)):
        if budget is not None and used > budget:
            outputs.append(None)
            steps.append(budget + 1)
            timeouts |= 1 << y
            continue
        outputs.append(out)
        steps.append(used)
        if out is Out.ONE:
            ones |= 1 << y
        elif out is Out.ZERO:
            zeros |= 1 << y
        else:
            bottoms |= 1 << y
    return Profile(tuple(outputs), tuple(steps), ones, zeros, bottoms, timeouts)


def as_mask(A: int | Iterable[int]) -> int:
    return A if isinstance(A, int) else mask_of(A)


def is_total_within(p: Program, ctx: ProgramContext, budget: int) -> bool:
    return profile(p, ctx, budget).total


def is_consistent(p: Program, A: int | Iterable[int], ctx: ProgramContext, budget: int | None = None) -> bool:
    A = as_mask(A)
    prof = profile(p, ctx, budget)
    return not (prof.ones & ~A) and not (prof.zeros & A)


def corresponds(
    p: Program, y: int, A: int | Iterable[int], mode: Mode, ctx: ProgramContext, budget: int | None = None
) -> bool:
    return correspondence_failure(p, y, A, mode, ctx, budget) is None


def correspondence_failure(
    p: Program, y: int, A: int | Iterable[int], mode: Mode, ctx: ProgramContext, budget: int | None = None
) -> str | None:
    """The first condition p violates for (y, A), or None when it corresponds."""
    prof = profile(p, ctx, budget)
    return outputs_failure(y, as_mask(A), mode, prof.ones, prof.zeros, prof.bottoms, prof.timeouts)


def outputs_failure(y: int, A: int, mode: Mode, ones: int, zeros: int, bottoms: int, timeouts: int = 0) -> str | None:
    """Correspondence conditions checked on per-column output masks."""
    if timeouts:
        return "C1"
    if mode is Mode.YES and zeros:
        return "C2"
    if mode is Mode.NO and ones:
        return "C2"
    if ones & ~A or zeros & A:
        return "C3"
    in_a = bool(A >> y & 1)
    if mode is Mode.YES and in_a and not ones >> y & 1:
        return "C4"
    if mode is Mode.NO and not in_a and not zeros >> y & 1:
        return "C4"
    if mode is Mode.TWO and bottoms >> y & 1:
        return "C4"
    return None


def output_set(p: Program, ctx: ProgramContext, value: Out, budget: int | None = None) -> list[int]:
    prof = profile(p, ctx, budget)
    mask = {Out.ONE: prof.ones, Out.ZERO: prof.zeros, Out.BOT: prof.bottoms}[value]
    return members(mask)


def iter_guesses(ctx: ProgramContext, families: Iterable[Family] = ALL_FAMILIES) -> Iterator[tuple[str, Program]]:
    """(encoding, program) for every base program, shortest first, then numerically."""
    pairs = [(encode(p, ctx), p) for p in ctx.base_programs(families)]
    pairs.sort(key=lambda item: (len(item[0]), from_bits(item[0])))
    yield from pairs
