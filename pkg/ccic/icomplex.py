"""Time-bounded instance complexity over the structured witness family."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from . import settings
from .bits import ceil_log2, from_bits
from .boolfun import BoolFunction, bits_of
from .covers import n_of_f_bits, protocol_size_bits
from .witness import (
    ALL_FAMILIES,
    COMBINE_OVERHEAD,
    Combine,
    Family,
    Mode,
    Out,
    Program,
    ProgramContext,
    as_mask,
    bit_length,
    context_for,
    correspondence_failure,
    encode,
    profile,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IcResult:
    value_bits: int | None
    witness: Program | None
    encoding: str | None
    mode: Mode
    budget: int
    model: str = "structured"

    @property
    def infinite(self) -> bool:
        return self.value_bits is None

    def to_report(self) -> dict:
        return {
            "model": self.model,
            "mode": self.mode.value,
            "value_bits": self.value_bits,
            "witness": None if self.witness is None else str(self.witness),
            "witness_encoding": None if self.encoding is None else "0b" + self.encoding,
            "budget": self.budget,
        }


# -------------------------------
# Budget
# -------------------------------
def compute_budget(f: BoolFunction, families: Iterable[Family] = ALL_FAMILIES) -> int:
    """Twice the largest step count of any candidate program on any column.

    Candidates are the base programs of ``families`` and, when COMBINE is
    among them, every one-level COMBINE of two base programs.
    """
    return _compute_budget(f, frozenset(families))


@lru_cache(maxsize=512)
def _compute_budget(f: BoolFunction, families: frozenset[Family]) -> int:
    ctx = context_for(f)
    profiles = [profile(p, ctx) for p in ctx.base_programs(families)]
    if not profiles:
        return 1
    worst = max(prof.max_steps for prof in profiles)
    if Family.COMBINE in families:
        for y in range(ctx.size):
            second = max(prof.steps[y] for prof in profiles)
            for prof in profiles:
                cost = COMBINE_OVERHEAD + prof.steps[y]
                if prof.outputs[y] is not Out.ONE:
                    cost += second
                worst = max(worst, cost)
    budget = max(1, 2 * worst)
    logger.debug("calibrated budget for %s: %s steps", f.label, budget)
    return budget


def resolve_budget(f: BoolFunction, budget: int | None = None, families: Iterable[Family] = ALL_FAMILIES) -> int:
    """An explicit budget, else CCIC_BUDGET, else the calibrated one."""
    if budget is not None:
        return budget
    if settings.BUDGET is not None:
        return settings.BUDGET
    return compute_budget(f, families)


# -------------------------------
# Minimization
# -------------------------------
@lru_cache(maxsize=512)
def candidate_programs(
    ctx: ProgramContext, mode: Mode, families: frozenset[Family] = ALL_FAMILIES
) -> tuple[tuple[str, Program], ...]:
    """Candidates in (length, numeric encoding) order."""
    base = ctx.base_programs(families)
    programs: list[Program] = list(base)
    if mode is Mode.TWO and Family.COMBINE in families:
        programs.extend(Combine(p, q) for p in base for q in base)
    pairs = [(encode(p, ctx), p) for p in programs]
    pairs.sort(key=lambda item: (len(item[0]), from_bits(item[0])))
    return tuple(pairs)


def ic_structured(
    y: int,
    A,
    mode: Mode,
    ctx: ProgramContext,
    budget: int,
    families: Iterable[Family] = ALL_FAMILIES,
) -> IcResult:
    A = as_mask(A)
    for encoding, p in candidate_programs(ctx, mode, frozenset(families)):
        if correspondence_failure(p, y, A, mode, ctx, budget) is None:
            return IcResult(len(encoding), p, encoding, mode, budget)
    logger.warning("no structured program corresponds for y=%s, mode %s in %s", y, mode.value, ctx.f.label)
    return IcResult(None, None, None, mode, budget)


@dataclass(frozen=True)
class PairIc:
    x: int
    y: int
    result: IcResult


def _qualifies(f: BoolFunction, x: int, y: int, mode: Mode) -> bool:
    if mode is Mode.YES:
        return f(x, y) == 1
    if mode is Mode.NO:
        return f(x, y) == 0
    return True


def ic_table(f: BoolFunction, mode: Mode, budget: int | None = None) -> list[PairIc]:
    """ic(y : Y1(x)) for every qualifying pair, in (x, y) order."""
    ctx = context_for(f)
    budget = resolve_budget(f, budget)
    rows = []
    for x in range(f.size):
        A = f.row_masks[x]
        for y in range(f.size):
            if _qualifies(f, x, y, mode):
                rows.append(PairIc(x, y, ic_structured(y, A, mode, ctx, budget)))
    return rows


@dataclass(frozen=True)
class MaxIc:
    value_bits: int | None
    argmax: tuple[int, int] | None
    result: IcResult | None
    empty: bool = False
    pairs: int = 0

    @property
    def infinite(self) -> bool:
        return not self.empty and self.value_bits is None


def max_ic_over_pairs(f: BoolFunction, mode: Mode, budget: int | None = None) -> MaxIc:
    """Max of ic(y : Y1(x)); the first pair in (x, y) order wins ties.

    An infinite value at any pair makes the maximum infinite.
    """
    table = ic_table(f, mode, budget)
    if not table:
        return MaxIc(None, None, None, empty=True)
    best: PairIc | None = None
    for row in table:
        if row.result.infinite:
            return MaxIc(None, (row.x, row.y), row.result, pairs=len(table))
        if best is None or row.result.value_bits > best.result.value_bits:
            best = row
    return MaxIc(best.result.value_bits, (best.x, best.y), best.result, pairs=len(table))


# -------------------------------
# Reports
# -------------------------------
@dataclass
class TheoremReport:
    function: str
    n: int
    mode: Mode
    lhs_bits: int | None
    rhs_bits: int | None
    tolerance: int
    budget: int
    lhs_raw: float | None = None
    argmax_pair: tuple[int, int] | None = None
    witness: Program | None = None
    witness_encoding: str | None = None
    empty: bool = False
    notice: str | None = None

    @property
    def gap(self) -> int | None:
        if self.lhs_bits is None or self.rhs_bits is None:
            return None
        return self.rhs_bits - self.lhs_bits

    @property
    def passed(self) -> bool:
        if self.empty:
            return True
        return self.gap is not None and abs(self.gap) <= self.tolerance

    def to_report(self) -> dict:
        pair = None
        if self.argmax_pair is not None:
            pair = [bits_of(self.argmax_pair[0], self.n), bits_of(self.argmax_pair[1], self.n)]
        return {
            "function": self.function,
            "n": self.n,
            "mode": self.mode.value,
            "lhs_bits": self.lhs_bits,
            "lhs_raw": self.lhs_raw,
            "rhs_bits": self.rhs_bits,
            "gap": self.gap,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "argmax_pair": pair,
            "witness": None if self.witness is None else str(self.witness),
            "witness_encoding": None if self.witness_encoding is None else "0b" + self.witness_encoding,
            "budget": self.budget,
            "empty_side": self.empty,
            "notice": self.notice,
        }


def verify_theorem(f: BoolFunction, mode: Mode, budget: int | None = None, tol: int | None = None) -> TheoremReport:
    """Compare the cover-based protocol size with the maximal instance complexity.

    yes: ceil(log2 C1) against max ic_yes over 1-pairs.
    no:  ceil(log2 C0) against max ic_no over 0-pairs.
    two: ceil(log2(2^k0 + 2^k1)) against max ic over all pairs.
    """
    tol = settings.TOLERANCE_BITS if tol is None else tol
    if tol < 0:
        raise ValueError(f"tolerance must be >= 0, got {tol}")
    budget = resolve_budget(f, budget)
    report = TheoremReport(f.label, f.n, mode, None, None, tol, budget)

    side = {Mode.YES: 1, Mode.NO: 0}.get(mode)
    if side is not None and not f.has_color(side):
        report.empty = True
        report.notice = f"empty side: {f.label} has no {side}-cells"
        logger.info("%s", report.notice)
        return report

    if mode is Mode.TWO:
        report.lhs_raw = n_of_f_bits(f)
        report.lhs_bits = math.ceil(report.lhs_raw)
    else:
        report.lhs_bits = protocol_size_bits(f, side)
        report.lhs_raw = float(report.lhs_bits)

    best = max_ic_over_pairs(f, mode, budget)
    report.rhs_bits = best.value_bits
    report.argmax_pair = best.argmax
    if best.result is not None:
        report.witness = best.result.witness
        report.witness_encoding = best.result.encoding
    if best.infinite:
        report.notice = "no structured program corresponds at the argmax pair"
    logger.info("%s mode %s: lhs %s, rhs %s, gap %s", f.label, mode.value, report.lhs_bits, report.rhs_bits, report.gap)
    return report


@dataclass
class CombinationReport:
    y: int
    A: int
    budget: int
    applicable: bool
    ic_yes: IcResult | None = None
    ic_no: IcResult | None = None
    ic_two: IcResult | None = None
    combined: Program | None = None
    combined_bits: int | None = None
    combined_corresponds: bool = False
    bound_bits: int | None = None

    @property
    def holds(self) -> bool:
        if not self.applicable:
            return True
        return (
            self.combined_corresponds
            and self.ic_two.value_bits is not None
            and self.ic_two.value_bits <= self.bound_bits
            and self.combined_bits == self.bound_bits
        )

    def to_report(self) -> dict:
        return {
            "y": self.y,
            "A": hex(self.A),
            "applicable": self.applicable,
            "ic_yes": None if self.ic_yes is None else self.ic_yes.value_bits,
            "ic_no": None if self.ic_no is None else self.ic_no.value_bits,
            "ic_two": None if self.ic_two is None else self.ic_two.value_bits,
            "combined": None if self.combined is None else str(self.combined),
            "combined_bits": self.combined_bits,
            "bound_bits": self.bound_bits,
            "combined_corresponds": self.combined_corresponds,
            "budget": self.budget,
            "holds": self.holds,
        }


def delimiter_bound(len_p: int, len_q: int) -> int:
    return len_p + len_q + 2 * ceil_log2(1 + min(len_p, len_q)) + 2


def combination_check(y: int, A, ctx: ProgramContext, budget: int) -> CombinationReport:
    """ic(two) at the combined budget against ic_yes + ic_no + delimiter overhead."""
    A = as_mask(A)
    combined_budget = 2 * budget + COMBINE_OVERHEAD
    yes = ic_structured(y, A, Mode.YES, ctx, budget)
    no = ic_structured(y, A, Mode.NO, ctx, budget)
    report = CombinationReport(y, A, combined_budget, applicable=not (yes.infinite or no.infinite), ic_yes=yes, ic_no=no)
    if not report.applicable:
        return report

    combined = Combine(yes.witness, no.witness)
    report.combined = combined
    report.combined_bits = bit_length(combined, ctx)
    report.bound_bits = delimiter_bound(yes.value_bits, no.value_bits)
    report.combined_corresponds = correspondence_failure(combined, y, A, Mode.TWO, ctx, combined_budget) is None
    report.ic_two = ic_structured(y, A, Mode.TWO, ctx, combined_budget)
    return report
