import math

import pytest

from ccic import settings
from ccic.boolfun import Oracle, generate_named, index_of
from ccic.icomplex import (
    candidate_programs,
    combination_check,
    compute_budget,
    delimiter_bound,
    ic_structured,
    ic_table,
    max_ic_over_pairs,
    resolve_budget,
    verify_theorem,
)
from ccic.witness import (
    BITTEST_FAMILIES,
    Combine,
    ConstBot,
    Family,
    Mode,
    Out,
    Rect1,
    Rect2,
    encode,
    execute,
    is_total_within,
)


def test_budget_neq2(neq2):
    # RECT reads 16 cells plus one step; a COMBINE of two RECTs is 1 + 17 + 17
    assert compute_budget(neq2) == 70
    assert compute_budget(neq2, BITTEST_FAMILIES) == 2
    assert compute_budget(neq2, {Family.CONSTBOT}) == 1


def test_resolve_budget(neq2, monkeypatch):
    monkeypatch.setattr(settings, "BUDGET", None)
    assert resolve_budget(neq2, 9) == 9
    assert resolve_budget(neq2) == 70
    monkeypatch.setattr(settings, "BUDGET", 40)
    assert resolve_budget(neq2) == 40
    assert resolve_budget(neq2, 9) == 9


def test_halved_budget_times_out_the_costliest_program(ctx_of, neq2):
    ctx = ctx_of(neq2)
    budget = compute_budget(neq2)
    candidates = [p for _, p in candidate_programs(ctx, Mode.TWO)]
    assert all(is_total_within(p, ctx, budget) for p in candidates)
    assert not all(is_total_within(p, ctx, budget // 2 - 1) for p in candidates)


def test_ic_neq1_yes(ctx_of, neq1):
    result = ic_structured(1, neq1.row_masks[0], Mode.YES, ctx_of(neq1), compute_budget(neq1))
    assert result.value_bits == 3
    assert result.witness == Rect1(0)
    assert result.encoding == "000"


def test_ic_outside_the_set_is_constbot(ctx_of, neq1):
    result = ic_structured(0, neq1.row_masks[0], Mode.YES, ctx_of(neq1), compute_budget(neq1))
    assert result.value_bits == 2
    assert result.witness == ConstBot()


def test_ic_no_mode(ctx_of, neq1):
    result = ic_structured(0, neq1.row_masks[0], Mode.NO, ctx_of(neq1), compute_budget(neq1))
    assert result.value_bits == 4
    assert result.witness == Rect2(0)
    assert result.encoding == "0100"


def test_ic_two_mode_const1(ctx_of, const1_1):
    result = ic_structured(0, const1_1.row_masks[0], Mode.TWO, ctx_of(const1_1), compute_budget(const1_1))
    assert result.value_bits == 2
    assert result.witness == Rect1(0)
    assert result.encoding == "00"


def test_ic_is_infinite_without_budget(ctx_of, neq1):
    result = ic_structured(1, neq1.row_masks[0], Mode.YES, ctx_of(neq1), 0)
    assert result.infinite
    assert result.to_report()["value_bits"] is None


def _assert_corresponds_by_running(p, y, A, mode, f, budget):
    runs = [execute(p, column, Oracle(f), budget) for column in range(f.size)]
    assert not any(run.timed_out for run in runs)
    outputs = [run.output for run in runs]
    assert set(outputs) <= mode.alphabet
    for column, out in enumerate(outputs):
        if out is Out.ONE:
            assert A >> column & 1
        elif out is Out.ZERO:
            assert not A >> column & 1
    if mode is Mode.YES and A >> y & 1:
        assert outputs[y] is Out.ONE
    if mode is Mode.NO and not A >> y & 1:
        assert outputs[y] is Out.ZERO
    if mode is Mode.TWO:
        assert outputs[y] is not Out.BOT


def test_witness_reverifies(ctx_of, named_n2):
    for f in named_n2:
        ctx = ctx_of(f)
        budget = compute_budget(f)
        for mode in Mode:
            for row in ic_table(f, mode, budget):
                A = f.row_masks[row.x]
                _assert_corresponds_by_running(row.result.witness, row.y, A, mode, f, budget)
                assert len(encode(row.result.witness, ctx)) == row.result.value_bits


def test_witness_reverifies_at_neq3(ctx_of, neq3):
    budget = compute_budget(neq3)
    for x, y in [(index_of("101", 3), index_of("100", 3)), (0, 0), (5, 2)]:
        A = neq3.row_masks[x]
        for mode in Mode:
            result = ic_structured(y, A, mode, ctx_of(neq3), budget)
            _assert_corresponds_by_running(result.witness, y, A, mode, neq3, budget)


def test_one_sided_values_never_exceed_two_sided(ctx_of, named_n2):
    for f in named_n2:
        ctx = ctx_of(f)
        budget = compute_budget(f)
        for x in range(f.size):
            A = f.row_masks[x]
            for y in range(f.size):
                two = ic_structured(y, A, Mode.TWO, ctx, budget).value_bits
                assert ic_structured(y, A, Mode.YES, ctx, budget).value_bits <= two
                assert ic_structured(y, A, Mode.NO, ctx, budget).value_bits <= two


@pytest.mark.parametrize("mode", [Mode.YES, Mode.TWO])
def test_more_budget_never_raises_ic(ctx_of, neq2, mode):
    ctx = ctx_of(neq2)
    budget = compute_budget(neq2)
    for x in range(neq2.size):
        A = neq2.row_masks[x]
        for y in range(neq2.size):
            base = ic_structured(y, A, mode, ctx, budget).value_bits
            assert ic_structured(y, A, mode, ctx, 2 * budget).value_bits == base
            tight = ic_structured(y, A, mode, ctx, budget // 4).value_bits
            assert tight is None or tight >= base


def test_max_ic(const1_2, neq2, const0_1):
    assert max_ic_over_pairs(const1_2, Mode.YES).value_bits == 2
    best = max_ic_over_pairs(neq2, Mode.YES)
    assert best.value_bits == 4
    assert best.argmax == (0, 1)
    empty = max_ic_over_pairs(const0_1, Mode.YES)
    assert empty.empty
    assert not empty.infinite


def test_theorem_yes_neq2(neq2):
    report = verify_theorem(neq2, Mode.YES)
    assert (report.lhs_bits, report.rhs_bits, report.gap) == (2, 4, 2)
    assert report.passed
    out = report.to_report()
    assert out["argmax_pair"] == ["00", "01"]
    assert out["witness_encoding"].startswith("0b")


def test_theorem_yes_const1(const1_2):
    report = verify_theorem(const1_2, Mode.YES)
    assert (report.lhs_bits, report.rhs_bits, report.gap) == (0, 2, 2)


def test_theorem_two_sided(neq2):
    report = verify_theorem(neq2, Mode.TWO)
    assert report.lhs_raw == 3.0
    assert (report.lhs_bits, report.rhs_bits, report.gap) == (3, 5, 2)
    eq = verify_theorem(generate_named("EQ", 2), Mode.TWO)
    assert (eq.lhs_bits, eq.rhs_bits) == (3, 5)


def test_theorem_no_mode(neq2):
    report = verify_theorem(neq2, Mode.NO)
    assert report.lhs_bits == 2
    assert report.rhs_bits == 5
    assert report.passed


def test_theorem_empty_side(const0_1):
    report = verify_theorem(const0_1, Mode.YES)
    assert report.empty
    assert report.passed
    assert report.gap is None
    assert "empty side" in report.notice


def test_theorem_tolerance(neq2):
    assert not verify_theorem(neq2, Mode.YES, tol=1).passed
    with pytest.raises(ValueError):
        verify_theorem(neq2, Mode.YES, tol=-1)


def test_theorem_eq3():
    report = verify_theorem(generate_named("EQ", 3), Mode.YES)
    assert report.lhs_bits == 3
    assert abs(report.gap) <= 3


def test_theorem_holds_for_every_n1_function(all_n1):
    for f in all_n1:
        for mode in (Mode.YES, Mode.TWO):
            report = verify_theorem(f, mode)
            assert report.passed, report.to_report()


def test_theorem_holds_at_n2(named_n2):
    for f in named_n2:
        for mode in (Mode.YES, Mode.TWO):
            assert verify_theorem(f, mode).passed, f.label


def test_lhs_rounds_up_the_log_sum():
    f = generate_named("DISJ", 2)
    report = verify_theorem(f, Mode.TWO)
    assert report.lhs_bits == math.ceil(report.lhs_raw)


def test_delimiter_bound():
    assert delimiter_bound(4, 2) == 12
    assert delimiter_bound(2, 5) == 13


def test_combination_inside_the_set(ctx_of, neq2):
    ctx = ctx_of(neq2)
    x, y = index_of("00", 2), index_of("11", 2)
    report = combination_check(y, neq2.row_masks[x], ctx, compute_budget(neq2))
    assert report.applicable
    assert report.ic_yes.value_bits == 4
    assert report.ic_no.value_bits == 2
    assert report.ic_no.witness == ConstBot()
    assert isinstance(report.combined, Combine)
    assert report.combined_bits == report.bound_bits == 12
    assert report.combined_corresponds
    assert report.ic_two.value_bits == 4
    assert report.holds
    assert report.budget == 2 * compute_budget(neq2) + 1


def test_combination_outside_the_set(ctx_of, neq2):
    ctx = ctx_of(neq2)
    report = combination_check(0, neq2.row_masks[0], ctx, compute_budget(neq2))
    assert report.ic_yes.value_bits == 2
    assert report.ic_no.value_bits == 5
    assert report.combined_bits == report.bound_bits == 13
    assert report.ic_two.value_bits == 5
    assert report.holds


def test_combination_holds_everywhere_at_n2(ctx_of, named_n2):
    for f in named_n2:
        ctx = ctx_of(f)
        budget = compute_budget(f)
        for x in range(f.size):
            for y in range(f.size):
                assert combination_check(y, f.row_masks[x], ctx, budget).holds, (f.label, x, y)
