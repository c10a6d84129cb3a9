"""Boolean functions f: {0,1}^n x {0,1}^n -> {0,1} stored as truth tables.

Row index x is Alice's input, column index y is Bob's. Both are n-bit strings
read big-endian (bit 0 is the leftmost character).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from pathlib import Path
from typing import Iterator

import numpy as np

from . import settings
from .bits import from_bits, is_bitstring, to_bits
from .errors import BfnParseError, UnknownFunctionError

logger = logging.getLogger(__name__)

NAMED_FUNCTIONS = ("NEQ", "EQ", "CONST0", "CONST1", "DISJ", "RANDOM")


@dataclass(frozen=True, eq=False)
class BoolFunction:
    n: int
    table: np.ndarray = field(repr=False)
    name: str | None = None
    seed: int | None = None

    def __post_init__(self):
        if not 1 <= self.n <= settings.MAX_N:
            raise ValueError(f"n must be in [1, {settings.MAX_N}], got {self.n}")
        size = 1 << self.n
        table = np.asarray(self.table, dtype=np.uint8)
        if table.shape != (size, size):
            raise ValueError(f"table must be {size}x{size}, got {table.shape}")
        if table.size and table.max() > 1:
            raise ValueError("table entries must be 0 or 1")
        table = table.copy()
        table.setflags(write=False)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "_hash", hash((self.n, table.tobytes())))

    @property
    def size(self) -> int:
        """Number of rows (= number of columns), 2^n."""
        return 1 << self.n

    @property
    def label(self) -> str:
        if self.name is None:
            return f"T{self.n}:{self.table.tobytes().hex()}"
        if self.seed is not None:
            return f"{self.name}#{self.seed}"
        return self.name

    def __call__(self, x: int, y: int) -> int:
        return int(self.table[x, y])

    def __eq__(self, other) -> bool:
        if not isinstance(other, BoolFunction):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return self._hash

    def __reduce__(self):
        return (BoolFunction, (self.n, self.table, self.name, self.seed))

    @cached_property
    def row_masks(self) -> tuple[int, ...]:
        """Bitmask of Y1(x) for every row x (bit y set iff f(x, y) = 1)."""
        weights = [1 << y for y in range(self.size)]
        return tuple(sum(w for w, v in zip(weights, row) if v) for row in self.table.tolist())

    @cached_property
    def col_masks(self) -> tuple[int, ...]:
        """Bitmask of X1(y) for every column y."""
        return BoolFunction(self.n, self.table.T).row_masks

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    def has_color(self, z: int) -> bool:
        return bool((self.table == z).any())


@dataclass(frozen=True)
class RowColSets:
    """Y0/Y1 for a fixed row, or X0/X1 for a fixed column."""

    Y0: frozenset[int] | None = None
    Y1: frozenset[int] | None = None
    X0: frozenset[int] | None = None
    X1: frozenset[int] | None = None


def bits_of(index: int, n: int) -> str:
    return to_bits(index, n)


def index_of(bits: str, n: int) -> int:
    if len(bits) != n or not is_bitstring(bits):
        raise ValueError(f"expected a {n}-bit string, got {bits!r}")
    return from_bits(bits)


def parse_index(value: str | int, n: int) -> int:
    """Accept an n-bit string (``"101"``) or an integer index."""
    if isinstance(value, str):
        return index_of(value, n)
    if not 0 <= value < 1 << n:
        raise ValueError(f"index {value} out of range for n={n}")
    return value


# -------------------------------
# .bfn text format
# -------------------------------
def parse_bfn(text: str) -> BoolFunction:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise BfnParseError("empty file", line=1)

    header = lines[0].strip()
    if not header.startswith("n="):
        raise BfnParseError(f"header must be 'n=<decimal>', got {header!r}", line=1, column=1)
    try:
        n = int(header[2:])
    except ValueError:
        raise BfnParseError(f"header must be 'n=<decimal>', got {header!r}", line=1, column=3) from None
    if not 1 <= n <= settings.MAX_N:
        raise BfnParseError(f"n must be in [1, {settings.MAX_N}], got {n}", line=1, column=3)

    size = 1 << n
    rows = lines[1:]
    if len(rows) < size:
        raise BfnParseError(f"expected {size} rows, found {len(rows)}", line=len(rows) + 2)
    if len(rows) > size:
        raise BfnParseError(f"expected {size} rows, found {len(rows)}", line=size + 2)

    table = np.zeros((size, size), dtype=np.uint8)
    for x, row in enumerate(rows):
        line_no = x + 2
        for col, ch in enumerate(row):
            if ch not in "01":
                raise BfnParseError(f"row {x + 1}: invalid symbol {ch!r}", line=line_no, column=col + 1)
        if len(row) != size:
            raise BfnParseError(f"row {x + 1}: expected {size} characters, found {len(row)}", line=line_no)
        table[x] = [int(ch) for ch in row]
    return BoolFunction(n, table)


def format_bfn(f: BoolFunction) -> str:
    rows = ["".join(str(v) for v in row) for row in f.table.tolist()]
    return f"n={f.n}\n" + "\n".join(rows) + "\n"


def from_file(path: str | Path) -> BoolFunction:
    path = Path(path)
    f = parse_bfn(path.read_text(encoding="utf-8"))
    return BoolFunction(f.n, f.table, name=path.stem)


def to_file(f: BoolFunction, path: str | Path) -> None:
    Path(path).write_text(format_bfn(f), encoding="utf-8")


# -------------------------------
# Generators
# -------------------------------
def generate_named(name: str, n: int, seed: int | None = None) -> BoolFunction:
    key = name.upper()
    if key not in NAMED_FUNCTIONS:
        raise UnknownFunctionError(f"unknown function {name!r}; choose from {', '.join(NAMED_FUNCTIONS)}")
    if not 1 <= n <= settings.MAX_N:
        raise ValueError(f"n must be in [1, {settings.MAX_N}], got {n}")
    if key == "RANDOM" and seed is None:
        raise ValueError("RANDOM needs a seed")

    size = 1 << n
    xs = np.arange(size)[:, None]
    ys = np.arange(size)[None, :]
    if key == "NEQ":
        table = xs != ys
    elif key == "EQ":
        table = xs == ys
    elif key == "CONST0":
        table = np.zeros((size, size))
    elif key == "CONST1":
        table = np.ones((size, size))
    elif key == "DISJ":
        table = (xs & ys) == 0
    else:
        table = np.random.default_rng(seed).integers(0, 2, size=(size, size))
    return BoolFunction(n, table.astype(np.uint8), name=key, seed=seed if key == "RANDOM" else None)


def enumerate_functions(n: int) -> Iterator[BoolFunction]:
    """Every function on n-bit inputs, in order of the row-major table read as a binary number."""
    size = 1 << n
    cells = size * size
    if cells > 16:
        logger.warning("enumerating all 2^%s functions for n=%s", cells, n)
    for values in product((0, 1), repeat=cells):
        table = np.array(values, dtype=np.uint8).reshape(size, size)
        code = "".join(map(str, values))
        yield BoolFunction(n, table, name=f"F{n}_{code}")


# -------------------------------
# Row / column views
# -------------------------------
def row_sets(f: BoolFunction, x: int) -> RowColSets:
    if not 0 <= x < f.size:
        raise IndexError(f"row {x} out of range for n={f.n}")
    row = f.table[x]
    return RowColSets(
        Y0=frozenset(int(y) for y in np.flatnonzero(row == 0)),
        Y1=frozenset(int(y) for y in np.flatnonzero(row == 1)),
    )


def col_sets(f: BoolFunction, y: int) -> RowColSets:
    if not 0 <= y < f.size:
        raise IndexError(f"column {y} out of range for n={f.n}")
    col = f.table[:, y]
    return RowColSets(
        X0=frozenset(int(x) for x in np.flatnonzero(col == 0)),
        X1=frozenset(int(x) for x in np.flatnonzero(col == 1)),
    )


class Oracle:
    """Length-n view of f handed to witness programs; counts every query."""

    def __init__(self, f: BoolFunction):
        self._f = f
        self.queries = 0

    @property
    def n(self) -> int:
        return self._f.n

    def query(self, a: str, b: str) -> int:
        n = self._f.n
        if len(a) != n or len(b) != n:
            raise ValueError(f"oracle queries need two {n}-bit strings, got {a!r}, {b!r}")
        return self.query_index(index_of(a, n), index_of(b, n))

    def query_index(self, x: int, y: int) -> int:
        self.queries += 1
        return self._f(x, y)

    def read_table(self) -> BoolFunction:
        """Read the whole length-n description, one query per cell."""
        self.queries += self._f.size * self._f.size
        return self._f


def oracle_view(f: BoolFunction) -> Oracle:
    return Oracle(f)
