import time
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ccic import covers
from ccic.boolfun import BoolFunction, generate_named
from ccic.covers import (
    Cover,
    Rectangle,
    brute_force_cover_number,
    combined_sequence,
    cover_number,
    log_sum_bits,
    maximal_rectangles,
    min_cover,
    n_of_f_bits,
    protocol_size_bits,
    verify_cover,
)
from ccic.errors import CoverLimitError, EmptySideError


def _least_cover_by_enumeration(f, z):
    rects = maximal_rectangles(f, z)
    universe = covers._universe(f, z)
    m = brute_force_cover_number(f, z)
    found = []
    for combo in combinations(rects, m):
        covered = 0
        for rect in combo:
            covered |= rect.cells(f.size)
        if covered == universe:
            found.append(tuple(r.key for r in combo))
    return min(found)


def test_maximal_rectangles_small(neq1, const1_1):
    assert maximal_rectangles(const1_1, 1) == (Rectangle(3, 3, 1),)
    assert maximal_rectangles(const1_1, 0) == ()
    assert maximal_rectangles(neq1, 1) == (Rectangle(1, 2, 1), Rectangle(2, 1, 1))


def test_rectangle_needs_rows_and_columns():
    with pytest.raises(ValueError):
        Rectangle(0, 1, 1)
    with pytest.raises(ValueError):
        Rectangle(1, 1, 2)


def test_neq1_covers(neq1):
    assert min_cover(neq1, 1).rectangles == (Rectangle(1, 2, 1), Rectangle(2, 1, 1))
    assert min_cover(neq1, 0).rectangles == (Rectangle(1, 1, 0), Rectangle(2, 2, 0))


@pytest.mark.parametrize(
    "name, n, z, expected",
    [
        ("NEQ", 2, 1, 4),
        ("NEQ", 2, 0, 4),
        ("EQ", 2, 1, 4),
        ("NEQ", 3, 1, 5),
        ("NEQ", 3, 0, 8),
        ("EQ", 3, 1, 8),
        ("CONST1", 2, 1, 1),
        ("CONST1", 2, 0, 0),
    ],
)
def test_cover_numbers(name, n, z, expected):
    assert cover_number(generate_named(name, n), z) == expected


def test_protocol_size_bits(const1_2, neq2):
    assert protocol_size_bits(const1_2, 1) == 0
    assert protocol_size_bits(neq2, 1) == 2
    assert protocol_size_bits(generate_named("EQ", 3), 1) == 3
    with pytest.raises(EmptySideError):
        protocol_size_bits(generate_named("CONST0", 2), 1)


def test_empty_side(const1_2):
    cover = min_cover(const1_2, 0)
    assert cover.is_empty_side
    assert cover.m == 0


def test_cover_limit():
    big = generate_named("NEQ", 5)
    with pytest.raises(CoverLimitError):
        min_cover(big, 1)
    with pytest.raises(CoverLimitError):
        maximal_rectangles(big, 1, limit=4)


def test_default_limit_refuses_n4():
    with pytest.raises(CoverLimitError):
        min_cover(generate_named("RANDOM", 4, 1), 1)


@pytest.mark.parametrize("name, z", [("NEQ", 0), ("EQ", 1)])
def test_diagonal_side_at_n4_is_fast(name, z):
    f = generate_named(name, 4)
    started = time.perf_counter()
    cover = min_cover(f, z, limit=4)
    elapsed = time.perf_counter() - started
    assert cover.m == 16
    assert verify_cover(f, cover)
    assert elapsed < 10


def test_random_n3_covers_are_fast():
    started = time.perf_counter()
    for seed in (0, 1):
        f = generate_named("RANDOM", 3, seed)
        for z in (0, 1):
            assert verify_cover(f, min_cover(f, z))
    assert time.perf_counter() - started < 60


def test_packing_bound(neq2, const1_2, named_n2):
    def search(f, z):
        masks = [r.cells(f.size) for r in maximal_rectangles(f, z)]
        return covers._CoverSearch(covers._universe(f, z), masks)

    diagonal = search(neq2, 0)
    assert diagonal.packing_bound(diagonal.universe) == 4
    whole = search(const1_2, 1)
    assert whole.packing_bound(whole.universe) == 1
    for f in named_n2:
        for z in (0, 1):
            if f.has_color(z):
                s = search(f, z)
                assert s.packing_bound(s.universe) <= cover_number(f, z), f.label


def test_color_must_be_0_or_1(neq1, const1_1):
    with pytest.raises(ValueError, match="z must be 0 or 1"):
        min_cover(const1_1, 2)
    with pytest.raises(ValueError):
        maximal_rectangles(neq1, -1)


def test_combined_sequence(neq1, const1_1):
    seq = combined_sequence(neq1)
    assert (seq.m, seq.m_prime) == (2, 2)
    assert seq.rectangles == (
        Rectangle(1, 1, 0),
        Rectangle(2, 2, 0),
        Rectangle(1, 2, 1),
        Rectangle(2, 1, 1),
    )
    assert seq.matching(2, 1) == (2, Rectangle(1, 2, 1))
    assert seq.matching(2, 0) == (1, Rectangle(2, 2, 0))
    assert seq.matching(3, 0) is None

    only_ones = combined_sequence(const1_1)
    assert (only_ones.m, only_ones.m_prime) == (0, 1)
    assert only_ones.rectangles == (Rectangle(3, 3, 1),)


def test_verify_cover(neq1):
    assert verify_cover(neq1, min_cover(neq1, 1))

    partial = verify_cover(neq1, Cover(1, (Rectangle(1, 2, 1),)))
    assert not partial
    assert partial.uncovered == [(1, 0)]

    impure = verify_cover(neq1, Cover(1, (Rectangle(3, 3, 1),)))
    assert not impure
    assert impure.impure == [Rectangle(3, 3, 1)]

    swapped = verify_cover(neq1, Cover(1, (Rectangle(2, 1, 1), Rectangle(1, 2, 1))))
    assert swapped.unsorted

    wrong = verify_cover(neq1, Cover(1, (Rectangle(1, 2, 0), Rectangle(2, 1, 1))))
    assert wrong.wrong_color == [Rectangle(1, 2, 0)]


def test_log_sum_bits():
    assert log_sum_bits(2, 2) == 3.0
    assert log_sum_bits(0, 0) == 1.0
    assert log_sum_bits(None, 3) == 3.0
    assert log_sum_bits(1, 2) == pytest.approx(np.log2(6))
    with pytest.raises(EmptySideError):
        log_sum_bits(None, None)


def test_n_of_f(neq2, const1_1):
    assert n_of_f_bits(neq2) == 3.0
    assert n_of_f_bits(const1_1) == 0.0


def test_minimum_matches_brute_force_n1(all_n1):
    for f in all_n1:
        for z in (0, 1):
            assert cover_number(f, z) == brute_force_cover_number(f, z), f.label


def test_minimum_matches_brute_force_n2(named_n2):
    for f in named_n2:
        for z in (0, 1):
            assert cover_number(f, z) == brute_force_cover_number(f, z), f.label


def test_cover_is_lexicographically_least(named_n2):
    for f in named_n2:
        for z in (0, 1):
            if not f.has_color(z):
                continue
            ours = tuple(r.key for r in min_cover(f, z))
            assert ours == _least_cover_by_enumeration(f, z), f.label


def test_cover_is_deterministic(neq2):
    first = min_cover(neq2, 1)
    covers._min_cover.cache_clear()
    assert min_cover(neq2, 1) == first


def test_columns_name_one_rectangle(named_n2):
    for f in named_n2:
        for z in (0, 1):
            cols = [r.cols for r in maximal_rectangles(f, z)]
            assert len(cols) == len(set(cols))


@given(st.integers(0, 2**16 - 1))
@settings(max_examples=30, deadline=None)
def test_random_tables_get_valid_minimum_covers(code):
    table = np.array([(code >> k) & 1 for k in range(16)]).reshape(4, 4)
    f = BoolFunction(2, table)
    for z in (0, 1):
        cover = min_cover(f, z)
        assert verify_cover(f, cover)
        assert cover.m == brute_force_cover_number(f, z)
