"""Construction rectangles, region classification and stage weights.

The measure is built by stages inside nested "construction rectangles".
Stage k+1 acts inside each level-k rectangle ``[l,r] x [b,t]``: after
``m_{k+1}`` uniform steps it redistributes mass for ``n_{k+1}`` steps, using
weight q on the q-favoured columns and p on the others inside a vertical
band that shrinks by ``4^{-(i-1)}`` per step (p and q swap roles in the
lower half).  The level-(k+1) rectangles are the full-width columns of the
two halves, inset by ``4^{-(M_k+m_{k+1})}``; the thin horizontal strips in
between are the left-over part, where every later weight is 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DepthExceeded, Straddle, Unaligned, UsageError
from .grid import Cell, RectQ
from .schedule import Params, phase_of_step

ROOT = "root"
UPPER = "upper"
LOWER = "lower"


@dataclass(frozen=True)
class WeightValue:
    """One stage weight: kind 'p' | 'q' | 'one' with its exact value."""

    kind: str
    value: Fraction

    def __eq__(self, other):
        if isinstance(other, WeightValue):
            return self.value == other.value
        return self.value == other


def weight_one() -> WeightValue:
    return WeightValue("one", Fraction(1))


def weight_p(params: Params) -> WeightValue:
    return WeightValue("p", params.p)


def weight_q(params: Params) -> WeightValue:
    return WeightValue("q", params.q)


@dataclass(frozen=True)
class CRect:
    """A construction rectangle.

    ``halves`` records the upper/lower choice at each stage (empty for the
    root), which together with the column index pins the rectangle down; the
    lineage of coarser rectangles is recomputed on demand, never stored.
    ``col`` is the column index at level ``M_k``; when a query cell is
    coarser than one column, ``col`` is the leftmost column overlapping it.
    """

    level: int
    col: int
    halves: tuple
    bounds: RectQ

    @property
    def half(self) -> str:
        return self.halves[-1] if self.halves else ROOT


@dataclass(frozen=True)
class RegionClass:
    """Classification of a cell against the level-k rectangles.

    ``kind`` is 'in_rect' (with the containing rectangle) or 'left_over'
    (with the stage at which the cell fell into a left-over strip).
    ``in_all_bands`` records whether the cell stayed inside every
    redistribution band seen so far (the vertical position descriptor used
    by the graph selection).
    """

    kind: str
    crect: CRect | None = None
    left_over_level: int | None = None
    in_all_bands: bool = True


def root_rect() -> CRect:
    return CRect(level=0, col=0, halves=(),
                 bounds=RectQ(Fraction(0), Fraction(1), Fraction(0), Fraction(1)))


def child_y_ranges(b: Fraction, t: Fraction, gap: Fraction):
    """Vertical extents (upper, lower) of the next-stage rectangles inside
    a rectangle spanning [b, t], inset by ``gap`` from each boundary and
    from the midline."""
    mid = (b + t) / 2
    return (mid + gap, t - gap), (b + gap, mid - gap)


def crect_children(parent: CRect, params: Params) -> list[CRect]:
    """All level-(k+1) rectangles inside ``parent`` (uppers first)."""
    k = parent.level
    if k + 1 > params.K:
        raise DepthExceeded(f"no stage {k + 1} configured (K={params.K})")
    m, n = params.stages[k]
    gap = params.rect_gap(k + 1)
    (ut_lo, ut_hi), (lt_lo, lt_hi) = child_y_ranges(parent.bounds.b, parent.bounds.t, gap)
    n_cols = 4 ** (m + n)
    width = Fraction(1, 4 ** params.M[k + 1])
    out = []
    for half, (ylo, yhi) in ((UPPER, (ut_lo, ut_hi)), (LOWER, (lt_lo, lt_hi))):
        for j in range(parent.col * n_cols, (parent.col + 1) * n_cols):
            out.append(CRect(
                level=k + 1, col=j, halves=parent.halves + (half,),
                bounds=RectQ(j * width, (j + 1) * width, ylo, yhi)))
    return out


def _interval_side(y0: Fraction, y1: Fraction, lo: Fraction, hi: Fraction,
                   what: str) -> bool:
    """True if [y0,y1] is inside [lo,hi], False if its interior is outside;
    raises Straddle otherwise."""
    if lo <= y0 and y1 <= hi:
        return True
    if y1 <= lo or y0 >= hi:
        return False
    raise Straddle(f"interval [{y0},{y1}] straddles {what} [{lo},{hi}]")


def weight_word(cell: Cell, params: Params) -> list[WeightValue]:
    """Exact weights w_1..w_level on the cell, one walk down the stages.

    Defined when ``cell.level <= M_K`` or the cell falls into a left-over
    strip before the stages run out; otherwise raises DepthExceeded.
    """
    level = cell.level
    scale = 4 ** level
    y0 = Fraction(cell.row, scale)
    y1 = Fraction(cell.row + 1, scale)
    out: list[WeightValue] = []
    b, t = Fraction(0), Fraction(1)
    k = 0
    step = 0
    while step < level:
        if k == params.K:
            raise DepthExceeded(
                f"cell at level {level} needs steps beyond M_K={params.M[-1]}")
        m, n = params.stages[k]
        base = params.M[k]
        # uniform phase
        while step < min(base + m, level):
            out.append(weight_one())
            step += 1
        if step == level:
            break
        mid = (b + t) / 2
        try:
            upper = _interval_side(y0, y1, mid, t, "upper half")
            if not upper and not _interval_side(y0, y1, b, mid, "lower half"):
                raise Unaligned(f"cell {cell} outside its rectangle at stage {k + 1}")
        except Straddle as exc:
            raise Unaligned(str(exc)) from exc
        shrink = Fraction(0)
        for off in range(1, n + 1):
            i = base + m + off
            if i > level:
                break
            if off > 1:
                shrink += Fraction(1, 4 ** (i - 1))
            if upper:
                lo, hi = mid + shrink, t - shrink
            else:
                lo, hi = b + shrink, mid - shrink
            try:
                in_band = _interval_side(y0, y1, lo, hi, f"band of step {i}")
            except Straddle as exc:
                raise Unaligned(str(exc)) from exc
            if not in_band:
                out.append(weight_one())
            else:
                digit = (cell.col // 4 ** (level - i)) % 4
                in_a = digit in (1, 2)
                q_here = in_a if upper else not in_a
                out.append(weight_q(params) if q_here else weight_p(params))
            step = i
        if step == level:
            break
        # stage complete: descend into a child rectangle or the left-over part
        gap = params.rect_gap(k + 1)
        (ut_lo, ut_hi), (lt_lo, lt_hi) = child_y_ranges(b, t, gap)
        if _interval_side(y0, y1, ut_lo, ut_hi, "upper child range"):
            b, t = ut_lo, ut_hi
        elif _interval_side(y0, y1, lt_lo, lt_hi, "lower child range"):
            b, t = lt_lo, lt_hi
        else:
            while step < level:  # left-over: weight 1 from here on
                out.append(weight_one())
                step += 1
            break
        k += 1
    return out


def weight(i: int, cell: Cell, params: Params) -> WeightValue:
    """The constant value of w_i on the cell interior.

    Requires ``cell.level >= i`` so the weight is constant on the cell.
    """
    if i < 1:
        raise UsageError(f"step index must be >= 1, got {i}")
    if cell.level < i:
        raise Unaligned(
            f"w_{i} is not constant on a level-{cell.level} cell")
    return weight_word(cell, params)[i - 1]


def locate(cell: Cell, k: int, params: Params) -> RegionClass:
    """Classify a cell against the level-k construction rectangles.

    Requires the cell fine enough that every boundary met on the way down is
    grid-aligned: ``cell.level >= M_{k-1} + m_k`` for k >= 1.
    """
    if k < 0 or k > params.K:
        raise UsageError(f"no level-{k} rectangles (K={params.K})")
    if k >= 1 and cell.level < params.M[k - 1] + params.stages[k - 1][0]:
        raise UsageError(
            f"cell at level {cell.level} too coarse to classify against "
            f"level-{k} rectangles")
    level = cell.level
    scale = 4 ** level
    y0 = Fraction(cell.row, scale)
    y1 = Fraction(cell.row + 1, scale)
    b, t = Fraction(0), Fraction(1)
    halves: tuple = ()
    # a weight of kind 'one' during a non-uniform step means the cell left
    # the band (or the rectangles altogether) at that step
    in_all_bands = True
    word = weight_word(cell, params)
    for idx, w in enumerate(word[:min(level, params.M[k])], start=1):
        if phase_of_step(idx, params).kind == "nonuniform" and w.kind == "one":
            in_all_bands = False
    for stage in range(1, k + 1):
        gap = params.rect_gap(stage)
        (ut_lo, ut_hi), (lt_lo, lt_hi) = child_y_ranges(b, t, gap)
        if _interval_side(y0, y1, ut_lo, ut_hi, "upper child range"):
            b, t, halves = ut_lo, ut_hi, halves + (UPPER,)
        elif _interval_side(y0, y1, lt_lo, lt_hi, "lower child range"):
            b, t, halves = lt_lo, lt_hi, halves + (LOWER,)
        else:
            return RegionClass(kind="left_over", left_over_level=stage,
                               in_all_bands=in_all_bands)
    if k == 0:
        return RegionClass(kind="in_rect", crect=root_rect(),
                           in_all_bands=in_all_bands)
    m_k = params.M[k]
    col = cell.col // 4 ** (level - m_k) if level >= m_k \
        else cell.col * 4 ** (m_k - level)
    width = Fraction(1, 4 ** m_k)
    rect = CRect(level=k, col=col, halves=halves,
                 bounds=RectQ(col * width, (col + 1) * width, b, t))
    return RegionClass(kind="in_rect", crect=rect, in_all_bands=in_all_bands)
