"""Monochromatic rectangles and canonical minimum covers.

Rectangles are pairs of bitmasks (row set A, column set B). The canonical key
of a rectangle is ``(rows, cols)``, which orders rectangles exactly like the
integer obtained by concatenating the row mask and then the column mask at a
fixed width. A cover is kept sorted by that key, and covers compare
lexicographically as key sequences.

Only inclusion-maximal rectangles are used to build covers. Any minimum cover
can be widened to one made of maximal rectangles of the same size, so C^z is
unaffected; and for a fixed column set there is exactly one maximal row set,
so a column set names at most one rectangle of a given color.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

from . import settings
from .bits import ceil_log2, mask_of, members
from .boolfun import BoolFunction
from .errors import CoverLimitError, EmptySideError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Rectangle:
    rows: int
    cols: int
    color: int

    def __post_init__(self):
        if not self.rows or not self.cols:
            raise ValueError("rectangles must have at least one row and one column")
        if self.color not in (0, 1):
            raise ValueError(f"color must be 0 or 1, got {self.color}")

    @property
    def key(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def key_int(self, size: int) -> int:
        return (self.rows << size) | self.cols

    def contains(self, x: int, y: int) -> bool:
        return bool(self.rows >> x & 1 and self.cols >> y & 1)

    def cells(self, size: int) -> int:
        """Mask over cells, cell (x, y) at bit x * size + y."""
        out = 0
        for x in members(self.rows):
            out |= self.cols << (x * size)
        return out

    def to_report(self) -> dict:
        return {"rows": hex(self.rows), "cols": hex(self.cols)}


@dataclass(frozen=True)
class Cover:
    color: int
    rectangles: tuple[Rectangle, ...] = ()

    @property
    def m(self) -> int:
        return len(self.rectangles)

    @property
    def is_empty_side(self) -> bool:
        return not self.rectangles

    def __iter__(self):
        return iter(self.rectangles)

    def __len__(self) -> int:
        return len(self.rectangles)

    def __getitem__(self, i: int) -> Rectangle:
        return self.rectangles[i]

    def with_columns(self, cols: int) -> tuple[int, Rectangle] | None:
        """The (index, rectangle) whose column set is exactly ``cols``."""
        for i, rect in enumerate(self.rectangles):
            if rect.cols == cols:
                return i, rect
        return None

    def to_report(self) -> dict:
        return {
            "color": self.color,
            "m": self.m,
            "rectangles": [r.to_report() for r in self.rectangles],
        }


@dataclass(frozen=True)
class CombinedSequence:
    """The 0-cover followed by the 1-cover: indices < m are 0-colored."""

    zero: Cover
    one: Cover

    @property
    def m(self) -> int:
        return self.zero.m

    @property
    def m_prime(self) -> int:
        return self.one.m

    @property
    def rectangles(self) -> tuple[Rectangle, ...]:
        return self.zero.rectangles + self.one.rectangles

    def __len__(self) -> int:
        return self.m + self.m_prime

    def __getitem__(self, i: int) -> Rectangle:
        return self.rectangles[i]

    def matching(self, cols: int, color: int) -> tuple[int, Rectangle] | None:
        side = self.one if color == 1 else self.zero
        found = side.with_columns(cols)
        if found is None:
            return None
        i, rect = found
        return (i + self.m if color == 1 else i), rect

    def to_report(self) -> dict:
        return {
            "m": self.m,
            "m_prime": self.m_prime,
            "sequence": [dict(r.to_report(), color=r.color) for r in self.rectangles],
        }


@dataclass
class CoverCheck:
    ok: bool
    uncovered: list[tuple[int, int]] = field(default_factory=list)
    impure: list[Rectangle] = field(default_factory=list)
    wrong_color: list[Rectangle] = field(default_factory=list)
    unsorted: bool = False

    def __bool__(self) -> bool:
        return self.ok


@lru_cache(maxsize=None)
def _warn_raised_limit(limit: int) -> None:
    logger.warning("cover limit raised to n=%s: cover search is exponential in 2^(2n)", limit)


def _check_limit(f: BoolFunction, limit: int | None) -> None:
    limit = settings.COVER_LIMIT if limit is None else limit
    if limit > settings.DEFAULT_COVER_LIMIT:
        _warn_raised_limit(limit)
    if f.n > limit:
        raise CoverLimitError(f"cover computations are limited to n <= {limit}, got n={f.n}")


def _check_color(z: int) -> None:
    if z not in (0, 1):
        raise ValueError(f"z must be 0 or 1, got {z}")


def _color_masks(f: BoolFunction, z: int) -> tuple[int, ...]:
    if z == 1:
        return f.row_masks
    return tuple(f.full_mask ^ r for r in f.row_masks)


def _universe(f: BoolFunction, z: int) -> int:
    size = f.size
    out = 0
    for x, r in enumerate(_color_masks(f, z)):
        out |= r << (x * size)
    return out


@lru_cache(maxsize=512)
def _maximal_rectangles(f: BoolFunction, z: int) -> tuple[Rectangle, ...]:
    zmasks = _color_masks(f, z)
    # Column sets of maximal rectangles are exactly the non-empty
    # intersections of row masks over non-empty row sets.
    closed: set[int] = set()
    for r in zmasks:
        closed |= {r & c for c in closed}
        closed.add(r)
    closed.discard(0)

    rects = []
    for cols in closed:
        rows = mask_of(x for x, r in enumerate(zmasks) if r & cols == cols)
        rects.append(Rectangle(rows, cols, z))
    rects.sort(key=lambda r: r.key)
    return tuple(rects)


def maximal_rectangles(f: BoolFunction, z: int, limit: int | None = None) -> tuple[Rectangle, ...]:
    _check_color(z)
    _check_limit(f, limit)
    return _maximal_rectangles(f, z)


class _CoverSearch:
    """Exact set cover over a fixed candidate list with a canonical tie-break."""

    def __init__(self, universe: int, masks: list[int]):
        self.universe = universe
        self.masks = masks
        self.by_cell: dict[int, list[int]] = {}
        # compat[cell]: every cell that shares some candidate with ``cell``
        self.compat: dict[int, int] = {}
        for i, mask in enumerate(masks):
            for cell in members(mask & universe):
                self.by_cell.setdefault(cell, []).append(i)
                self.compat[cell] = self.compat.get(cell, 0) | mask
        self.max_cover = max((m.bit_count() for m in masks), default=0)
        # (uncovered, start) -> largest k known to fail; failure is monotone in k
        self._failed: dict[tuple[int, int], int] = {}
        self.nodes = 0

    def greedy(self) -> int:
        uncovered = self.universe
        used = 0
        while uncovered:
            best = max(self.masks, key=lambda m: (m & uncovered).bit_count())
            uncovered &= ~best
            used += 1
        return used

    def packing_bound(self, uncovered: int) -> int:
        """Size of a greedy set of cells no two of which share a candidate."""
        count = 0
        left = uncovered
        while left:
            cell = (left & -left).bit_length() - 1
            left &= ~self.compat[cell]
            count += 1
        return count

    def can_cover(self, uncovered: int, k: int, start: int) -> bool:
        """Can ``uncovered`` be covered by k candidates of index >= start?"""
        if not uncovered:
            return True
        if k == 0 or uncovered.bit_count() > k * self.max_cover:
            return False
        key = (uncovered, start)
        if self._failed.get(key, -1) >= k:
            return False
        self.nodes += 1

        found = False
        options = None
        for c in members(uncovered):
            opts = [i for i in self.by_cell.get(c, ()) if i >= start]
            if options is None or len(opts) < len(options):
                options = opts
                if len(opts) <= 1:
                    break
        if options:
            if k == 1:
                found = any(self.masks[i] & uncovered == uncovered for i in options)
            elif self.packing_bound(uncovered) <= k:
                options.sort(key=lambda i: -(self.masks[i] & uncovered).bit_count())
                found = any(self.can_cover(uncovered & ~self.masks[i], k - 1, start) for i in options)
        if not found:
            self._failed[key] = max(k, self._failed.get(key, -1))
        return found

    def minimum_size(self) -> int:
        upper = self.greedy()
        lower = max(1, -(-self.universe.bit_count() // self.max_cover), self.packing_bound(self.universe))
        for k in range(lower, upper):
            if self.can_cover(self.universe, k, 0):
                return k
        return upper

    def least_cover(self, m: int) -> list[int]:
        """Lexicographically least index sequence of a size-m cover."""
        chosen: list[int] = []
        uncovered = self.universe
        start = 0
        for remaining in range(m, 0, -1):
            for i in range(start, len(self.masks)):
                rest = uncovered & ~self.masks[i]
                if self.can_cover(rest, remaining - 1, i + 1):
                    chosen.append(i)
                    uncovered = rest
                    start = i + 1
                    break
            else:
                raise RuntimeError("cover search lost feasibility; this is a bug")
        return chosen


@lru_cache(maxsize=512)
def _min_cover(f: BoolFunction, z: int) -> Cover:
    rects = _maximal_rectangles(f, z)
    if not rects:
        return Cover(z, ())
    size = f.size
    search = _CoverSearch(_universe(f, z), [r.cells(size) for r in rects])
    m = search.minimum_size()
    chosen = search.least_cover(m)
    logger.debug("min %s-cover of %s: m=%s after %s search nodes", z, f.label, m, search.nodes)
    return Cover(z, tuple(rects[i] for i in chosen))


def min_cover(f: BoolFunction, z: int, limit: int | None = None) -> Cover:
    """Canonical minimum z-cover; an empty cover when f never takes value z."""
    _check_color(z)
    _check_limit(f, limit)
    return _min_cover(f, z)


def cover_number(f: BoolFunction, z: int, limit: int | None = None) -> int:
    return min_cover(f, z, limit).m


def protocol_size_bits(f: BoolFunction, z: int, limit: int | None = None) -> int:
    m = cover_number(f, z, limit)
    if m == 0:
        raise EmptySideError(f"{f.label} has no {z}-cells; the {z}-side protocol size is undefined")
    return ceil_log2(m)


def combined_sequence(f: BoolFunction, limit: int | None = None) -> CombinedSequence:
    return CombinedSequence(min_cover(f, 0, limit), min_cover(f, 1, limit))


def verify_cover(f: BoolFunction, cover: Cover) -> CoverCheck:
    check = CoverCheck(ok=True)
    size = f.size
    covered = 0
    for rect in cover.rectangles:
        if rect.color != cover.color:
            check.wrong_color.append(rect)
        cells = rect.cells(size)
        if cells & ~_universe(f, cover.color):
            check.impure.append(rect)
        covered |= cells
    missing = _universe(f, cover.color) & ~covered
    check.uncovered = [divmod(c, size) for c in members(missing)]
    keys = [r.key for r in cover.rectangles]
    check.unsorted = keys != sorted(set(keys))
    check.ok = not (check.uncovered or check.impure or check.wrong_color or check.unsorted)
    return check


def log_sum_bits(k0: int | None, k1: int | None) -> float:
    """log2(2^k0 + 2^k1); a missing side contributes nothing."""
    if k0 is None and k1 is None:
        raise EmptySideError("both sides are empty")
    if k0 is None:
        return float(k1)
    if k1 is None:
        return float(k0)
    if k0 == k1:
        return float(k0 + 1)
    return math.log2(2**k0 + 2**k1)


def n_of_f_bits(f: BoolFunction, limit: int | None = None) -> float:
    k0 = protocol_size_bits(f, 0, limit) if f.has_color(0) else None
    k1 = protocol_size_bits(f, 1, limit) if f.has_color(1) else None
    return log_sum_bits(k0, k1)


def brute_force_cover_number(f: BoolFunction, z: int) -> int:
    """C^z by trying every subset of maximal rectangles in order of size."""
    rects = _maximal_rectangles(f, z)
    universe = _universe(f, z)
    if not universe:
        return 0
    masks = [r.cells(f.size) for r in rects]
    for k in range(1, len(masks) + 1):
        for combo in combinations(masks, k):
            covered = 0
            for mask in combo:
                covered |= mask
            if covered == universe:
                return k
    raise RuntimeError("maximal rectangles do not cover the universe; this is a bug")
