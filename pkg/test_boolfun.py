import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ccic.boolfun import (
    BoolFunction,
    Oracle,
    bits_of,
    col_sets,
    enumerate_functions,
    format_bfn,
    from_file,
    generate_named,
    index_of,
    oracle_view,
    parse_bfn,
    row_sets,
    to_file,
)
from ccic.errors import BfnParseError, UnknownFunctionError


def test_parse_neq_file():
    f = parse_bfn("n=1\n01\n10\n")
    assert f.n == 1
    assert f.table.tolist() == [[0, 1], [1, 0]]
    assert f == generate_named("NEQ", 1)


def test_parse_without_trailing_newline():
    f = parse_bfn("n=1\n10\n01")
    assert f.table.tolist() == [[1, 0], [0, 1]]
    assert f == generate_named("EQ", 1)


def test_parse_bad_symbol_names_row_and_column():
    with pytest.raises(BfnParseError) as err:
        parse_bfn("n=1\n12\n00\n")
    assert err.value.line == 2
    assert err.value.column == 2
    assert "row 1" in str(err.value)


@pytest.mark.parametrize(
    "text, line",
    [
        ("", 1),
        ("m=1\n01\n10\n", 1),
        ("n=x\n01\n10\n", 1),
        ("n=13\n", 1),
        ("n=0\n", 1),
        ("n=1\n01\n", 3),
        ("n=1\n01\n10\n11\n", 4),
        ("n=1\n011\n10\n", 2),
    ],
)
def test_parse_errors_report_line(text, line):
    with pytest.raises(BfnParseError) as err:
        parse_bfn(text)
    assert err.value.line == line
    assert isinstance(err.value, ValueError)


def test_file_round_trip(tmp_path):
    f = generate_named("DISJ", 2)
    path = tmp_path / "disj.bfn"
    to_file(f, path)
    assert path.read_text() == format_bfn(f)
    g = from_file(path)
    assert g == f
    assert g.name == "disj"


def test_sample_file_matches_generator(data_dir):
    assert from_file(data_dir / "disj2.bfn") == generate_named("DISJ", 2)
    assert from_file(data_dir / "neq1.bfn") == generate_named("NEQ", 1)


@given(st.integers(1, 3).flatmap(lambda n: st.lists(st.integers(0, 1), min_size=4**n, max_size=4**n)))
@settings(max_examples=40, deadline=None)
def test_format_parse_is_bit_exact(values):
    size = int(len(values) ** 0.5)
    n = size.bit_length() - 1
    f = BoolFunction(n, np.array(values).reshape(size, size))
    text = format_bfn(f)
    assert format_bfn(parse_bfn(text)) == text


def test_generators():
    assert generate_named("NEQ", 1).table.tolist() == [[0, 1], [1, 0]]
    assert generate_named("CONST1", 2).table.tolist() == [[1] * 4] * 4
    assert generate_named("DISJ", 1).table.tolist() == [[1, 1], [1, 0]]
    eq, neq = generate_named("EQ", 3), generate_named("NEQ", 3)
    assert np.array_equal(eq.table, 1 - neq.table)


def test_random_is_seeded():
    a = generate_named("RANDOM", 3, seed=7)
    b = generate_named("RANDOM", 3, seed=7)
    assert a == b
    assert a.label == "RANDOM#7"
    with pytest.raises(ValueError):
        generate_named("RANDOM", 2)


def test_unknown_name():
    with pytest.raises(UnknownFunctionError):
        generate_named("XOR", 2)


def test_table_is_read_only():
    f = generate_named("EQ", 1)
    with pytest.raises(ValueError):
        f.table[0, 0] = 0


def test_row_and_column_sets(neq1, const1_2):
    assert row_sets(neq1, 0).Y1 == {1}
    assert row_sets(neq1, 0).Y0 == {0}
    assert row_sets(const1_2, 3).Y1 == {0, 1, 2, 3}
    assert row_sets(generate_named("EQ", 2), 2).Y1 == {2}
    assert col_sets(neq1, 1).X1 == {0}
    with pytest.raises(IndexError):
        row_sets(neq1, 2)


@given(st.integers(0, 2**16 - 1))
def test_row_sets_partition_columns(code):
    table = np.array([(code >> k) & 1 for k in range(16)]).reshape(4, 4)
    f = BoolFunction(2, table)
    for x in range(4):
        sets = row_sets(f, x)
        assert len(sets.Y0) + len(sets.Y1) == 4
        assert not sets.Y0 & sets.Y1
        assert f.row_masks[x] == sum(1 << y for y in sets.Y1)


def test_bit_convention():
    assert bits_of(3, 3) == "011"
    assert index_of("011", 3) == 3
    assert index_of("100", 3) == 4
    with pytest.raises(ValueError):
        index_of("01", 3)


def test_oracle_answers_and_counts(neq2):
    oracle = oracle_view(neq2)
    assert oracle.query("01", "01") == 0
    assert oracle.query("01", "11") == 1
    assert oracle.queries == 2
    with pytest.raises(ValueError):
        oracle.query("1", "01")
    oracle.read_table()
    assert oracle.queries == 18


@pytest.mark.parametrize("name", ["NEQ", "EQ", "DISJ"])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_oracle_agrees_with_table(name, n):
    f = generate_named(name, n)
    oracle = Oracle(f)
    for x in range(f.size):
        for y in range(f.size):
            assert oracle.query(bits_of(x, n), bits_of(y, n)) == f.table[x, y]


def test_enumerate_n1():
    functions = list(enumerate_functions(1))
    assert len(functions) == 16
    assert len(set(functions)) == 16
    assert functions[0].table.sum() == 0
    assert functions[-1].table.sum() == 4
