"""4-adic squares on the unit square: indexing, bounds, adjacency.

A level-``i`` cell is the square ``[col*4^-i, (col+1)*4^-i] x [row*4^-i,
(row+1)*4^-i]``.  Point membership uses half-open intervals in each axis,
except that x = 1 or y = 1 belongs to the last cell, so every point has a
unique cell at every level.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import LevelMismatch, UsageError


@dataclass(frozen=True)
class Cell:
    """A 4-adic square identified by (level, col, row)."""

    level: int
    col: int
    row: int

    def __post_init__(self):
        if self.level < 0:
            raise UsageError(f"negative level {self.level}")
        side = 4 ** self.level
        if not (0 <= self.col < side and 0 <= self.row < side):
            raise UsageError(f"cell indices out of range: {self}")

    def children(self) -> list["Cell"]:
        """The 16 level-(i+1) subcells, row-major."""
        return [
            Cell(self.level + 1, 4 * self.col + dc, 4 * self.row + dr)
            for dr in range(4)
            for dc in range(4)
        ]

    def parent(self) -> "Cell":
        if self.level == 0:
            raise UsageError("root cell has no parent")
        return Cell(self.level - 1, self.col // 4, self.row // 4)


@dataclass(frozen=True)
class RectQ:
    """Axis-parallel rectangle with exact rational corners inside [0,1]^2."""

    l: Fraction
    r: Fraction
    b: Fraction
    t: Fraction

    def __post_init__(self):
        object.__setattr__(self, "l", Fraction(self.l))
        object.__setattr__(self, "r", Fraction(self.r))
        object.__setattr__(self, "b", Fraction(self.b))
        object.__setattr__(self, "t", Fraction(self.t))
        if not (0 <= self.l < self.r <= 1 and 0 <= self.b < self.t <= 1):
            raise UsageError(f"degenerate or out-of-range rectangle: {self}")

    @property
    def width(self) -> Fraction:
        return self.r - self.l

    @property
    def height(self) -> Fraction:
        return self.t - self.b

    def contains(self, other: "RectQ") -> bool:
        return (self.l <= other.l and other.r <= self.r
                and self.b <= other.b and other.t <= self.t)


def cell_bounds(c: Cell) -> RectQ:
    """Exact bounding rectangle of a cell; side length 4^-level."""
    s = Fraction(1, 4 ** c.level)
    return RectQ(c.col * s, (c.col + 1) * s, c.row * s, (c.row + 1) * s)


def adjacent(a: Cell, b: Cell) -> bool:
    """Whether the two closed squares intersect (edges and corners count).

    Both cells must have the same level; a cell is adjacent to itself.
    """
    if a.level != b.level:
        raise LevelMismatch(f"levels differ: {a.level} vs {b.level}")
    return abs(a.col - b.col) <= 1 and abs(a.row - b.row) <= 1


def a_membership(i: int, col: int) -> bool:
    """Whether the open level-i column lies in the q-favoured column set.

    The set is the union of the two middle quarters of every level-(i-1)
    column, so membership is simply ``col mod 4 in {1, 2}``.
    """
    if i < 1:
        raise UsageError(f"step index must be >= 1, got {i}")
    if not (0 <= col < 4 ** i):
        raise UsageError(f"column {col} out of range at level {i}")
    return col % 4 in (1, 2)


def cell_containing(x: Fraction, y: Fraction, level: int) -> Cell:
    """The unique level-``level`` cell containing (x, y).

    Half-open convention: boundary points go to the right/upper cell,
    except that coordinate 1 belongs to the last cell.
    """
    if not (0 <= x <= 1 and 0 <= y <= 1):
        raise UsageError(f"point outside unit square: ({x}, {y})")
    side = 4 ** level
    col = min(int(Fraction(x) * side), side - 1)
    row = min(int(Fraction(y) * side), side - 1)
    return Cell(level, col, row)
