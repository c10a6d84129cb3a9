"""Non-deterministic protocols as Alice/Bob state machines over a counting channel.

A guess w reaches Alice out of band. Alice decodes it, runs her checks and
either rejects (no message is sent, both parties output ⊥) or forwards w to
Bob. Bob evaluates the program on his input and answers with one bit; FIG3
ends with Alice's one-bit confirmation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

from . import settings
from .bits import all_bitstrings, ceil_log2, count_bitstrings
from .boolfun import BoolFunction, Oracle, bits_of, parse_index
from .covers import log_sum_bits, n_of_f_bits, protocol_size_bits
from .icomplex import ic_structured, resolve_budget
from .witness import (
    ALL_FAMILIES,
    BITTEST_FAMILIES,
    BitTest,
    Family,
    Mode,
    Out,
    Program,
    ProgramContext,
    Rect1,
    Rect2,
    context_for,
    decode_guess,
    execute,
    profile,
)

logger = logging.getLogger(__name__)

ALICE = "alice"
BOB = "bob"


class ProtocolKind(Enum):
    FIG1_ONE_SIDED = "fig1"
    FIG3_P_PRIME = "fig3"
    FIG4_TWO_SIDED = "fig4"
    NEQ_SPECIAL = "neq"

    @property
    def two_sided(self) -> bool:
        return self is ProtocolKind.FIG4_TWO_SIDED

    @property
    def guess_families(self) -> frozenset[Family]:
        """Families Alice is willing to decode."""
        if self is ProtocolKind.NEQ_SPECIAL:
            return frozenset({Family.BITTEST})
        return ALL_FAMILIES

    @property
    def budget_families(self) -> frozenset[Family]:
        if self is ProtocolKind.NEQ_SPECIAL:
            return BITTEST_FAMILIES
        return ALL_FAMILIES

    @classmethod
    def parse(cls, value: str) -> "ProtocolKind":
        key = value.strip().lower()
        for kind in cls:
            if key in (kind.value, kind.name.lower()):
                return kind
        raise ValueError(f"unknown protocol {value!r}; choose from {', '.join(k.value for k in cls)}")


ONE_SIDED_KINDS = (ProtocolKind.FIG1_ONE_SIDED, ProtocolKind.FIG3_P_PRIME, ProtocolKind.NEQ_SPECIAL)


@dataclass(frozen=True)
class Message:
    sender: str
    bits: str
    forwards_guess: bool = False


@dataclass
class Transcript:
    protocol: ProtocolKind
    n: int
    x: int
    y: int
    guess: str
    messages: list[Message] = field(default_factory=list)
    output_alice: Out = Out.BOT
    output_bob: Out = Out.BOT
    reason: str | None = None

    @property
    def conversation_bits(self) -> int:
        return sum(len(m.bits) for m in self.messages)

    @property
    def conversation_bits_excluding_guess(self) -> int:
        return sum(len(m.bits) for m in self.messages if not m.forwards_guess)

    @property
    def verdict(self) -> Out:
        return self.output_alice

    @property
    def agreed(self) -> bool:
        return self.output_alice is self.output_bob

    def to_report(self) -> dict:
        return {
            "protocol": self.protocol.value,
            "n": self.n,
            "x": bits_of(self.x, self.n),
            "y": bits_of(self.y, self.n),
            "guess": "0b" + self.guess,
            "messages": [{"from": m.sender, "bits": m.bits} for m in self.messages],
            "conversation_bits": self.conversation_bits,
            "conversation_bits_excluding_guess": self.conversation_bits_excluding_guess,
            "output_alice": self.output_alice.value,
            "output_bob": self.output_bob.value,
            "verdict": self.verdict.value,
            "reason": self.reason,
        }


class Channel:
    def __init__(self):
        self.messages: list[Message] = []

    def send(self, sender: str, bits: str, forwards_guess: bool = False) -> str:
        self.messages.append(Message(sender, bits, forwards_guess))
        return bits

    @property
    def bits_sent(self) -> int:
        return sum(len(m.bits) for m in self.messages)


# -------------------------------
# Parties
# -------------------------------
@dataclass(frozen=True)
class AliceCheck:
    accepted: bool
    program: Program | None = None
    color: int = 1
    reason: str | None = None


def _reject(reason: str, program: Program | None = None) -> AliceCheck:
    return AliceCheck(False, program, reason=reason)


@lru_cache(maxsize=1 << 18)
def alice_check(kind: ProtocolKind, ctx: ProgramContext, x: int, w: str, budget: int) -> AliceCheck:
    p = decode_guess(w, ctx, kind.guess_families)
    if not p:
        return _reject(p.reason)
    prof = profile(p, ctx, budget)
    if not prof.total:
        return _reject(f"program exceeds {budget} steps", p)

    row = ctx.f.row_masks[x]
    if kind is ProtocolKind.FIG4_TWO_SIDED:
        B = prof.decided
        if not B:
            return _reject("program never decides", p)
        if prof.ones and prof.zeros:
            return _reject("program outputs both colors", p)
        z = 1 if prof.ones else 0
        match = ctx.sequence.matching(B, z)
        if match is None:
            return _reject(f"no {z}-rectangle in the cover sequence has that column set", p)
        if not match[1].rows >> x & 1:
            return _reject("x is not a row of the matched rectangle", p)
        return AliceCheck(True, p, color=z)

    if prof.zeros:
        return _reject("program outputs 0", p)
    if kind is ProtocolKind.FIG1_ONE_SIDED:
        match = ctx.one_cover.with_columns(prof.ones) if prof.ones else None
        if match is None:
            return _reject("no rectangle of the canonical 1-cover has that column set", p)
        if not match[1].rows >> x & 1:
            return _reject("x is not a row of the matched rectangle", p)
        return AliceCheck(True, p)
    if prof.ones & ~row:
        return _reject("program is inconsistent with Y1(x)", p)
    return AliceCheck(True, p)


class Alice:
    def __init__(self, kind: ProtocolKind, ctx: ProgramContext, x: int, budget: int):
        self.kind = kind
        self.ctx = ctx
        self.x = x
        self.budget = budget
        self.output = Out.BOT
        self._check: AliceCheck | None = None

    def receive_guess(self, w: str) -> AliceCheck:
        self._check = alice_check(self.kind, self.ctx, self.x, w, self.budget)
        return self._check

    def hear(self, reply: str, channel: Channel) -> Out:
        if reply == "1":
            self.output = Out.of_color(self._check.color)
            if self.kind is ProtocolKind.FIG3_P_PRIME:
                channel.send(ALICE, "1")
        return self.output


class Bob:
    def __init__(self, kind: ProtocolKind, ctx: ProgramContext, y: int, budget: int):
        self.kind = kind
        self.ctx = ctx
        self.y = y
        self.budget = budget
        self.output = Out.BOT

    def receive(self, w: str, channel: Channel) -> Out:
        p = decode_guess(w, self.ctx, self.kind.guess_families)
        value = Out.BOT
        if p:
            result = execute(p, self.y, Oracle(self.ctx.f), self.budget)
            value = result.output or Out.BOT
        if self.kind.two_sided:
            self.output = value
        else:
            self.output = Out.ONE if value is Out.ONE else Out.BOT
        channel.send(BOB, "0" if self.output is Out.BOT else "1")
        return self.output


def run(kind: ProtocolKind, f: BoolFunction, x: int, y: int, w: str, budget: int | None = None) -> Transcript:
    x, y = parse_index(x, f.n), parse_index(y, f.n)
    ctx = context_for(f)
    budget = resolve_budget(f, budget, kind.budget_families)
    transcript = Transcript(kind, f.n, x, y, w)

    alice = Alice(kind, ctx, x, budget)
    bob = Bob(kind, ctx, y, budget)
    check = alice.receive_guess(w)
    if not check.accepted:
        transcript.reason = check.reason
        return transcript

    channel = Channel()
    channel.send(ALICE, w, forwards_guess=True)
    bob.receive(w, channel)
    alice.hear(channel.messages[-1].bits, channel)

    transcript.messages = channel.messages
    transcript.output_alice = alice.output
    transcript.output_bob = bob.output
    if alice.output is Out.BOT:
        transcript.reason = "Bob rejected the guess"
    return transcript


# -------------------------------
# Guesses
# -------------------------------
def default_wmax(kind: ProtocolKind, ctx: ProgramContext) -> int:
    bittest = ceil_log2(ctx.n) + 1
    if kind is ProtocolKind.NEQ_SPECIAL:
        longest = bittest
    else:
        rect1 = ceil_log2(ctx.m1) if ctx.m1 else 0
        longest = max(rect1, ceil_log2(ctx.m0 + ctx.m1), bittest)
    return 2 + longest + settings.WMAX_SLACK


@lru_cache(maxsize=1 << 14)
def accepted_guesses(kind: ProtocolKind, ctx: ProgramContext, x: int, budget: int, wmax: int) -> tuple[str, ...]:
    """Guesses of length <= wmax that Alice forwards for row x, shortest first."""
    return tuple(w for w in all_bitstrings(wmax) if alice_check(kind, ctx, x, w, budget).accepted)


def target_of(kind: ProtocolKind, f: BoolFunction, x: int, y: int) -> Out:
    if kind.two_sided:
        return Out.of_color(f(x, y))
    return Out.ONE


@dataclass(frozen=True)
class Violation:
    condition: str
    x: int
    y: int
    guess: str | None = None

    def to_report(self, n: int) -> dict:
        return {
            "condition": self.condition,
            "x": bits_of(self.x, n),
            "y": bits_of(self.y, n),
            "guess": None if self.guess is None else "0b" + self.guess,
        }


@dataclass
class ConditionsReport:
    protocol: ProtocolKind
    function: str
    n: int
    wmax: int
    budget: int
    guesses: int
    runs: int = 0
    violations: list[Violation] = field(default_factory=list)

    def failed(self, condition: str) -> bool:
        return any(v.condition == condition for v in self.violations)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_report(self) -> dict:
        return {
            "protocol": self.protocol.value,
            "function": self.function,
            "n": self.n,
            "wmax": self.wmax,
            "budget": self.budget,
            "guesses_per_pair": self.guesses,
            "runs": self.runs,
            "completeness": not self.failed("completeness"),
            "soundness": not self.failed("soundness"),
            "agreement": not self.failed("agreement"),
            "pass": self.passed,
            "violations": [v.to_report(self.n) for v in self.violations],
        }


def verify_conditions(
    kind: ProtocolKind, f: BoolFunction, budget: int | None = None, wmax: int | None = None
) -> ConditionsReport:
    """Completeness and soundness over every pair and every guess up to wmax.

    Guesses Alice rejects end the run with ⊥ before any message, so only the
    accepted ones need a full run.
    """
    ctx = context_for(f)
    budget = resolve_budget(f, budget, kind.budget_families)
    wmax = default_wmax(kind, ctx) if wmax is None else wmax
    report = ConditionsReport(kind, f.label, f.n, wmax, budget, count_bitstrings(wmax))

    for x in range(f.size):
        guesses = accepted_guesses(kind, ctx, x, budget, wmax)
        for y in range(f.size):
            value = f(x, y)
            needed = kind.two_sided or value == 1
            found = False
            for w in guesses:
                t = run(kind, f, x, y, w, budget)
                report.runs += 1
                if not t.agreed:
                    report.violations.append(Violation("agreement", x, y, w))
                verdict = t.verdict
                if verdict is Out.BOT:
                    continue
                if verdict is Out.of_color(value):
                    found = True
                else:
                    report.violations.append(Violation("soundness", x, y, w))
            if needed and not found:
                report.violations.append(Violation("completeness", x, y))
    if report.violations:
        logger.warning("%s on %s: %s violations", kind.value, f.label, len(report.violations))
    return report


# -------------------------------
# Complexities
# -------------------------------
@dataclass(frozen=True)
class Individual:
    bits: int | None
    bits_excluding_guess: int | None
    guess: str | None
    target: Out

    @property
    def undefined(self) -> bool:
        return self.bits is None


def individual_complexity(
    kind: ProtocolKind, f: BoolFunction, x: int, y: int, budget: int | None = None, wmax: int | None = None
) -> Individual:
    """Shortest conversation reaching the pair's target verdict, over guesses up to wmax."""
    ctx = context_for(f)
    budget = resolve_budget(f, budget, kind.budget_families)
    wmax = default_wmax(kind, ctx) if wmax is None else wmax
    target = target_of(kind, f, x, y)
    best: Transcript | None = None
    for w in accepted_guesses(kind, ctx, x, budget, wmax):
        if best is not None and len(w) + 1 >= best.conversation_bits:
            break
        t = run(kind, f, x, y, w, budget)
        if t.verdict is target and (best is None or t.conversation_bits < best.conversation_bits):
            best = t
    if best is None:
        return Individual(None, None, None, target)
    return Individual(best.conversation_bits, best.conversation_bits_excluding_guess, best.guess, target)


@dataclass(frozen=True)
class ProtocolComplexity:
    protocol: ProtocolKind
    function: str
    n: int
    value_bits: float | None
    side_bits: dict
    argmax: dict
    cover_bits: float | None
    undefined_pair: tuple[int, int] | None = None

    @property
    def undefined(self) -> bool:
        return self.value_bits is None

    def to_report(self) -> dict:
        return {
            "protocol": self.protocol.value,
            "function": self.function,
            "n": self.n,
            "value_bits": self.value_bits,
            "side_bits": {str(z): v for z, v in self.side_bits.items()},
            "argmax": {str(z): [bits_of(x, self.n), bits_of(y, self.n)] for z, (x, y) in self.argmax.items()},
            "cover_bits": self.cover_bits,
            "undefined_pair": None
            if self.undefined_pair is None
            else [bits_of(c, self.n) for c in self.undefined_pair],
        }


@lru_cache(maxsize=256)
def protocol_complexity(
    kind: ProtocolKind, f: BoolFunction, budget: int | None = None, wmax: int | None = None
) -> ProtocolComplexity:
    """N_P for one protocol: max individual complexity per side, log-summed for FIG4."""
    budget = resolve_budget(f, budget, kind.budget_families)
    sides = (0, 1) if kind.two_sided else (1,)
    side_bits: dict[int, int] = {}
    argmax: dict[int, tuple[int, int]] = {}

    for x in range(f.size):
        for y in range(f.size):
            z = f(x, y)
            if z not in sides:
                continue
            ind = individual_complexity(kind, f, x, y, budget, wmax)
            if ind.undefined:
                return ProtocolComplexity(kind, f.label, f.n, None, side_bits, argmax, None, undefined_pair=(x, y))
            if z not in side_bits or ind.bits > side_bits[z]:
                side_bits[z] = ind.bits
                argmax[z] = (x, y)

    if not side_bits:
        value = None
    elif kind.two_sided:
        value = log_sum_bits(side_bits.get(0), side_bits.get(1))
    else:
        value = float(side_bits[1])

    # The NEQ protocol reads no covers.
    cover_bits = None
    if kind is not ProtocolKind.NEQ_SPECIAL and f.n <= settings.COVER_LIMIT:
        if kind.two_sided:
            cover_bits = n_of_f_bits(f)
        elif f.has_color(1):
            cover_bits = float(protocol_size_bits(f, 1))
    return ProtocolComplexity(kind, f.label, f.n, value, side_bits, argmax, cover_bits)


def canonical_witness(
    kind: ProtocolKind, ctx: ProgramContext, x: int, y: int, budget: int | None = None
) -> Program | None:
    """The witness a completeness argument names for (x, y), or None if there is none."""
    f = ctx.f
    if kind is ProtocolKind.NEQ_SPECIAL:
        for i in range(f.n):
            xi = (x >> (f.n - 1 - i)) & 1
            if xi != (y >> (f.n - 1 - i)) & 1:
                return BitTest(i, xi)
        return None
    if kind is ProtocolKind.FIG3_P_PRIME:
        if f(x, y) != 1:
            return None
        budget = resolve_budget(f, budget)
        return ic_structured(y, f.row_masks[x], Mode.YES, ctx, budget).witness
    if kind is ProtocolKind.FIG1_ONE_SIDED:
        for i, rect in enumerate(ctx.one_cover):
            if rect.contains(x, y):
                return Rect1(i)
        return None
    z = f(x, y)
    for i, rect in enumerate(ctx.sequence.rectangles):
        if rect.color == z and rect.contains(x, y):
            return Rect2(i)
    return None


def auto_guess(kind: ProtocolKind, f: BoolFunction, x: int, y: int, budget: int | None = None) -> str | None:
    """The exact instance-complexity witness when the protocol accepts it.

    Otherwise the shortest guess up to wmax that reaches the target verdict.
    """
    ctx = context_for(f)
    budget = resolve_budget(f, budget, kind.budget_families)
    target = target_of(kind, f, x, y)
    if kind.two_sided or f(x, y) == 1:
        mode = Mode.TWO if kind.two_sided else Mode.YES
        ic = ic_structured(y, f.row_masks[x], mode, ctx, budget, kind.budget_families)
        if ic.encoding is not None and run(kind, f, x, y, ic.encoding, budget).verdict is target:
            return ic.encoding
    return individual_complexity(kind, f, x, y, budget).guess


# -------------------------------
# Individual bounds
# -------------------------------
@dataclass
class IndividualBoundReport:
    function: str
    n: int
    x: int
    y: int
    value: int
    tolerance: int
    one_sided: dict | None = None
    two_sided: dict | None = None

    @property
    def passed(self) -> bool:
        blocks = [b for b in (self.one_sided, self.two_sided) if b is not None and b["applicable"]]
        return all(b["lower_ok"] and b["upper_ok"] for b in blocks)

    def to_report(self) -> dict:
        return {
            "function": self.function,
            "n": self.n,
            "x": bits_of(self.x, self.n),
            "y": bits_of(self.y, self.n),
            "f": self.value,
            "tolerance": self.tolerance,
            "one_sided": self.one_sided,
            "two_sided": self.two_sided,
            "pass": self.passed,
        }


def _bound_block(restricted: int | None, ic: int | None, n_p: float | None, tol: int, **extra) -> dict:
    block = {"applicable": True, "restricted_n": restricted, "ic": ic, "n_p": n_p, **extra}
    block["gap"] = None if restricted is None or ic is None else restricted - ic
    block["lower_ok"] = restricted is not None and ic is not None and restricted >= ic - tol
    block["upper_ok"] = restricted is not None and n_p is not None and restricted <= n_p
    return block


def individual_bound_check(
    f: BoolFunction, x: int, y: int, budget: int | None = None, tol: int | None = None
) -> IndividualBoundReport:
    """Restricted individual complexity against ic and N_P for one pair.

    The one-sided block minimises over FIG1, FIG3 and the NEQ protocol and is
    only applicable when f(x, y) = 1; the two-sided block uses FIG4.
    """
    tol = settings.TOLERANCE_BITS if tol is None else tol
    ctx = context_for(f)
    budget = resolve_budget(f, budget)
    value = f(x, y)
    report = IndividualBoundReport(f.label, f.n, x, y, value, tol)
    A = f.row_masks[x]

    if value == 1:
        per_kind = {}
        for kind in ONE_SIDED_KINDS:
            kind_budget = budget if kind is not ProtocolKind.NEQ_SPECIAL else None
            per_kind[kind.value] = individual_complexity(kind, f, x, y, kind_budget).bits
        defined = [b for b in per_kind.values() if b is not None]
        restricted = min(defined) if defined else None
        ic_yes = ic_structured(y, A, Mode.YES, ctx, budget).value_bits
        n_p = protocol_complexity(ProtocolKind.FIG1_ONE_SIDED, f, budget).value_bits
        report.one_sided = _bound_block(restricted, ic_yes, n_p, tol, per_protocol=per_kind)
    else:
        report.one_sided = {"applicable": False, "notice": "f(x, y) = 0: the one-sided bound does not apply"}

    fig4 = individual_complexity(ProtocolKind.FIG4_TWO_SIDED, f, x, y, budget).bits
    ic_two = ic_structured(y, A, Mode.TWO, ctx, budget).value_bits
    n_p2 = protocol_complexity(ProtocolKind.FIG4_TWO_SIDED, f, budget).value_bits
    report.two_sided = _bound_block(fig4, ic_two, n_p2, tol)
    return report
