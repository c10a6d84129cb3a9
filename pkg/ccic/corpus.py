"""Sweep corpus and the per-function checks run over it."""

from __future__ import annotations

import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Iterable

from tqdm import tqdm

from . import settings
from .bits import ceil_log2
from .boolfun import BoolFunction, enumerate_functions, generate_named
from .covers import brute_force_cover_number, cover_number
from .icomplex import combination_check, ic_structured, resolve_budget, verify_theorem
from .microvm import vm_ic
from .protocols import ProtocolKind, canonical_witness, individual_bound_check, run, verify_conditions
from .witness import Mode, Out, context_for, encode

logger = logging.getLogger(__name__)

NAMED_AT_2 = ("NEQ", "EQ", "DISJ", "CONST0", "CONST1")
NAMED_AT_3 = ("NEQ", "EQ")

# Largest |vm_ic - ic_structured| accepted at n = 1.
VM_CROSS_TOLERANCE = 4


def build_corpus(n: int, random_count: int | None = None, seed: int | None = None) -> list[BoolFunction]:
    """All functions at n = 1; named and seeded random ones at n = 2; NEQ and EQ at n = 3."""
    random_count = settings.RANDOM_COUNT if random_count is None else random_count
    seed = settings.SEED if seed is None else seed
    if n == 1:
        return list(enumerate_functions(1))
    if n == 2:
        named = [generate_named(name, 2) for name in NAMED_AT_2]
        randoms = [generate_named("RANDOM", 2, seed + k) for k in range(random_count)]
        return named + randoms
    if n == 3:
        return [generate_named(name, 3) for name in NAMED_AT_3]
    raise ValueError(f"the sweep corpus covers n = 1, 2, 3; got n={n}")


def _row(f: BoolFunction, check: str, passed: bool, tol: int, lhs=None, rhs=None, gap=None, detail="") -> dict:
    return {
        "function": f.label,
        "n": f.n,
        "check": check,
        "lhs_bits": lhs,
        "rhs_bits": rhs,
        "gap": gap,
        "tolerance": tol,
        "pass": passed,
        "detail": detail,
    }


def _theorem_rows(f: BoolFunction, budget: int, tol: int) -> list[dict]:
    rows = []
    for mode in (Mode.YES, Mode.TWO):
        report = verify_theorem(f, mode, budget, tol)
        detail = report.notice or ""
        rows.append(
            _row(f, f"theorem_{mode.value}", report.passed, tol, report.lhs_bits, report.rhs_bits, report.gap, detail)
        )
    return rows


def _conditions_rows(f: BoolFunction, budget: int, tol: int) -> list[dict]:
    kinds = [ProtocolKind.FIG1_ONE_SIDED, ProtocolKind.FIG3_P_PRIME, ProtocolKind.FIG4_TWO_SIDED]
    if f.name == "NEQ":
        kinds.append(ProtocolKind.NEQ_SPECIAL)
    rows = []
    for kind in kinds:
        kind_budget = None if kind is ProtocolKind.NEQ_SPECIAL else budget
        report = verify_conditions(kind, f, kind_budget)
        detail = f"wmax={report.wmax} runs={report.runs} violations={len(report.violations)}"
        rows.append(_row(f, f"conditions_{kind.value}", report.passed, tol, detail=detail))
    return rows


def _fig4_length_row(f: BoolFunction, budget: int, tol: int) -> dict:
    ctx = context_for(f)
    expected = 2 + ceil_log2(ctx.m0 + ctx.m1)
    bad = 0
    for x in range(f.size):
        for y in range(f.size):
            p = canonical_witness(ProtocolKind.FIG4_TWO_SIDED, ctx, x, y)
            w = encode(p, ctx)
            verdict = run(ProtocolKind.FIG4_TWO_SIDED, f, x, y, w, budget).verdict
            if len(w) != expected or verdict is not Out.of_color(f(x, y)):
                bad += 1
    return _row(f, "fig4_witness_length", bad == 0, tol, lhs=expected, detail=f"mismatches={bad}")


def _combination_row(f: BoolFunction, budget: int, tol: int) -> dict:
    ctx = context_for(f)
    failures = checked = 0
    worst = None
    for x in range(f.size):
        for y in range(f.size):
            report = combination_check(y, f.row_masks[x], ctx, budget)
            if not report.applicable:
                continue
            checked += 1
            if not report.holds:
                failures += 1
            slack = report.bound_bits - report.ic_two.value_bits if report.ic_two.value_bits is not None else None
            if slack is not None and (worst is None or slack < worst):
                worst = slack
    return _row(f, "combination", failures == 0, tol, gap=worst, detail=f"instances={checked} failures={failures}")


def _individual_row(f: BoolFunction, budget: int, tol: int) -> dict:
    failures = 0
    worst = None
    for x in range(f.size):
        for y in range(f.size):
            report = individual_bound_check(f, x, y, budget, tol)
            if not report.passed:
                failures += 1
            for block in (report.one_sided, report.two_sided):
                if block and block.get("applicable") and block["gap"] is not None:
                    worst = block["gap"] if worst is None else min(worst, block["gap"])
    return _row(f, "individual_bounds", failures == 0, tol, gap=worst, detail=f"failures={failures}")


def _cover_oracle_row(f: BoolFunction, tol: int) -> dict:
    pairs = [(cover_number(f, z), brute_force_cover_number(f, z)) for z in (0, 1)]
    ok = all(a == b for a, b in pairs)
    detail = " ".join(f"C{z}={a}/{b}" for z, (a, b) in enumerate(pairs))
    return _row(f, "cover_oracle", ok, tol, detail=detail)


def _vm_row(f: BoolFunction, budget: int, tol: int) -> dict:
    ctx = context_for(f)
    worst = 0
    missing = 0
    for x in range(f.size):
        A = f.row_masks[x]
        for y in range(f.size):
            for mode in (Mode.YES, Mode.TWO):
                structured = ic_structured(y, A, mode, ctx, budget).value_bits
                vm = vm_ic(y, A, mode, f).value_bits
                if structured is None or vm is None:
                    missing += 1
                    continue
                worst = max(worst, abs(vm - structured))
    ok = missing == 0 and worst <= VM_CROSS_TOLERANCE
    return _row(f, "vm_cross_model", ok, VM_CROSS_TOLERANCE, gap=worst, detail=f"missing={missing}")


def check_function(f: BoolFunction, tol: int | None = None) -> list[dict]:
    """Every sweep check that applies at f's input length."""
    tol = settings.TOLERANCE_BITS if tol is None else tol
    budget = resolve_budget(f)
    rows = _theorem_rows(f, budget, tol)
    rows.append(_fig4_length_row(f, budget, tol))
    if f.n <= 2:
        rows.extend(_conditions_rows(f, budget, tol))
        rows.append(_combination_row(f, budget, tol))
        rows.append(_individual_row(f, budget, tol))
        rows.append(_cover_oracle_row(f, tol))
    if f.n == 1:
        rows.append(_vm_row(f, budget, tol))
    return rows


def run_sweep(
    functions: Iterable[BoolFunction], tol: int | None = None, workers: int | None = None, progress: bool = True
) -> list[dict]:
    """Rows for every function, in corpus order regardless of worker count."""
    functions = list(functions)
    workers = settings.WORKERS if workers is None else workers
    job = partial(check_function, tol=tol)
    bar = partial(tqdm, total=len(functions), file=sys.stderr, disable=not progress, desc="sweep")
    rows: list[dict] = []
    if workers <= 1:
        for result in bar(map(job, functions)):
            rows.extend(result)
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            for result in bar(executor.map(job, functions)):
                rows.extend(result)
    failed = sum(1 for r in rows if not r["pass"])
    logger.info("sweep: %s functions, %s checks, %s failed", len(functions), len(rows), failed)
    return rows
