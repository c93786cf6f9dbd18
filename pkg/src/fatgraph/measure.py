"""Exact measure engine: densities, cell and rectangle masses, diagnostics.

The measure of a level-L cell is its density (the product of the first L
stage weights, a monomial p^u * q^v) times the cell area 16^-L.  Refinement
never changes the mass of a cell that already exists, so these values are
the measure's values outright, and exhaustive sweeps certify that: total
mass 1 and parent-equals-children-sum at every level.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .construction import child_y_ranges, weight_word
from .errors import (CapTooCoarse, DepthExceeded, SweepTooLarge, UnalignedRect,
                     UsageError)
from .grid import Cell, RectQ, cell_bounds
from .rat import rat_str
from .schedule import Params

DEFAULT_SWEEP_LIMIT = 16 ** 6


def sweep_limit() -> int:
    """Cell budget for exhaustive sweeps; FATGRAPH_EXHAUSTIVE_LIMIT overrides."""
    raw = os.environ.get("FATGRAPH_EXHAUSTIVE_LIMIT")
    return int(raw) if raw else DEFAULT_SWEEP_LIMIT


def _check_sweep(L: int) -> None:
    if 16 ** L > sweep_limit():
        raise SweepTooLarge(
            f"16^{L} cells exceed the exhaustive limit {sweep_limit()}; "
            "raise FATGRAPH_EXHAUSTIVE_LIMIT or use sampled checks")


def density(cell: Cell, params: Params) -> Fraction:
    """Constant density of the measure on the cell: product of its weights."""
    out = Fraction(1)
    for w in weight_word(cell, params):
        out *= w.value
    return out


def mu_cell(cell: Cell, params: Params) -> Fraction:
    """Exact mass of a 4-adic cell (density times area)."""
    return density(cell, params) / 16 ** cell.level


def point_density(x: Fraction, y: Fraction, upto: int, params: Params) -> Fraction:
    """Density at a single point, evaluated from the weight case rules.

    Independent of the cell walk: band and column membership are tested
    pointwise (half-open convention, so avoid 4-adic boundary points when
    cross-checking cell densities).
    """
    x, y = Fraction(x), Fraction(y)
    out = Fraction(1)
    b, t = Fraction(0), Fraction(1)
    step = 0
    for k, (m, n) in enumerate(params.stages):
        if step >= upto:
            break
        step = min(params.M[k] + m, upto)
        if step == upto:
            break
        mid = (b + t) / 2
        upper = y >= mid
        shrink = Fraction(0)
        for off in range(1, n + 1):
            i = params.M[k] + m + off
            if i > upto:
                break
            if off > 1:
                shrink += Fraction(1, 4 ** (i - 1))
            lo, hi = (mid + shrink, t - shrink) if upper else (b + shrink, mid - shrink)
            if lo <= y < hi:
                digit = min(int(x * 4 ** i), 4 ** i - 1) % 4
                in_a = digit in (1, 2)
                out *= params.q if (in_a if upper else not in_a) else params.p
            step = i
        if step == upto:
            break
        gap = params.rect_gap(k + 1)
        (u_lo, u_hi), (l_lo, l_hi) = child_y_ranges(b, t, gap)
        if u_lo <= y < u_hi:
            b, t = u_lo, u_hi
        elif l_lo <= y < l_hi:
            b, t = l_lo, l_hi
        else:
            return out  # left-over: all later weights are 1
    if step < upto:
        raise DepthExceeded(f"point density needs steps beyond M_K={params.M[-1]}")
    return out


# -- rectangle masses --------------------------------------------------------

def alignment_level(rect: RectQ, max_level: int) -> int | None:
    """Smallest level <= max_level at which all corners are 4-adic."""
    for lam in range(max_level + 1):
        scale = 4 ** lam
        if all((c * scale).denominator == 1 for c in (rect.l, rect.r, rect.b, rect.t)):
            return lam
    return None


def mu_rect(rect: RectQ, params: Params) -> Fraction:
    """Exact mass of a rectangle aligned at some level <= M_K.

    Decomposes the rectangle into maximal cells by quadtree descent, so only
    boundary cells are refined; boundaries themselves are null.
    """
    lam = alignment_level(rect, params.total_steps)
    if lam is None:
        raise UnalignedRect(
            "corners are not 4-adic at any level <= M_K; "
            "use mu_rect_enclosure for an exact interval")

    def rec(cell: Cell) -> Fraction:
        cb = cell_bounds(cell)
        if rect.contains(cb):
            return mu_cell(cell, params)
        if cb.l >= rect.r or cb.r <= rect.l or cb.b >= rect.t or cb.t <= rect.b:
            return Fraction(0)
        return sum((rec(ch) for ch in cell.children()), Fraction(0))

    return rec(Cell(0, 0, 0))


def mu_rect_enclosure(rect: RectQ, params: Params, level_cap: int,
                      tol: Fraction | None = None):
    """Exact interval [lower, upper] bracketing the mass of any rectangle.

    Lower/upper come from the unions of level-``level_cap`` cells inside /
    meeting the rectangle.  Raises CapTooCoarse when a tolerance is given
    and the interval is wider.
    """
    if level_cap > params.total_steps:
        raise UsageError(f"level cap {level_cap} exceeds M_K={params.total_steps}")
    scale = 4 ** level_cap

    def aligned(c0, c1, r0, r1):
        c0, c1 = max(c0, 0), min(c1, scale)
        r0, r1 = max(r0, 0), min(r1, scale)
        if c0 >= c1 or r0 >= r1:
            return None
        return RectQ(Fraction(c0, scale), Fraction(c1, scale),
                     Fraction(r0, scale), Fraction(r1, scale))

    inner = aligned(math.ceil(rect.l * scale), math.floor(rect.r * scale),
                    math.ceil(rect.b * scale), math.floor(rect.t * scale))
    outer = aligned(math.floor(rect.l * scale), math.ceil(rect.r * scale),
                    math.floor(rect.b * scale), math.ceil(rect.t * scale))
    lo = mu_rect(inner, params) if inner is not None else Fraction(0)
    hi = mu_rect(outer, params) if outer is not None else Fraction(0)
    if tol is not None and hi - lo > tol:
        raise CapTooCoarse(
            f"enclosure width {hi - lo} exceeds tolerance {tol} at level {level_cap}")
    return lo, hi


# -- sweeps ------------------------------------------------------------------

def exponent_histogram(L: int, params: Params, backend=None) -> dict:
    """{(u, v): cell count} over all level-L cells, via the sweep backend."""
    _check_sweep(L)
    be = backend or kernels.backend
    rows = kernels.row_band_states(L, params)
    cols = kernels.col_a_bits(L, params)
    U, V = be.exponent_matrices(rows, cols)
    keys = U.astype(np.int64) * 256 + V.astype(np.int64)
    counts = np.bincount(keys.ravel())
    return {(int(k) // 256, int(k) % 256): int(c)
            for k, c in enumerate(counts) if c}


def total_mass(L: int, params: Params, backend=None) -> Fraction:
    """Exact total mass at depth L from the exponent histogram."""
    hist = exponent_histogram(L, params, backend)
    p, q = params.p, params.q
    return sum((cnt * p ** u * q ** v for (u, v), cnt in sorted(hist.items())),
               Fraction(0)) / 16 ** L


@dataclass(frozen=True)
class Fault:
    """Test hook: pretend the weight of cell (level, col, row) at its own
    level reads 1 instead of its true value (a corrupted-build simulation)."""

    level: int
    col: int
    row: int


@dataclass(frozen=True)
class MeasureReport:
    depth: int
    total_mass: Fraction
    violations: int
    max_child_sum_error: Fraction
    witness: tuple | None = None

    @property
    def ok(self) -> bool:
        return self.total_mass == 1 and self.violations == 0

    def to_json_dict(self) -> dict:
        doc = {
            "depth": self.depth,
            "total_mass": rat_str(self.total_mass),
            "violations": self.violations,
            "max_child_sum_error": rat_str(self.max_child_sum_error),
        }
        if self.witness is not None:
            doc["witness"] = list(self.witness)
        return doc


def diagnostics(L: int, params: Params, backend=None, workers: int = 1,
                fault: Fault | None = None) -> MeasureReport:
    """Exhaustive conservation sweep to depth L.

    Checks, for every level < L and every cell, that the 16 children's
    masses sum exactly to the parent's (equivalently that the refining
    step's weights average 1 over the children), plus total mass at depth L.
    """
    _check_sweep(L)
    be = backend or kernels.backend
    p, q = params.p, params.q
    violations = 0
    max_err = Fraction(0)
    witness = None
    for lvl in range(L):
        child_level = lvl + 1
        rows = kernels.row_band_states(child_level, params)
        cols = kernels.col_a_bits(child_level, params)
        steps = kernels.nonuniform_steps(params, child_level)
        step_pos = steps.index(child_level) if child_level in steps else None
        recs = dict(be.child_weight_stats(rows, cols, step_pos))
        if fault is not None and fault.level == child_level:
            recs = _patch_fault_records(recs, fault, params)
        for (n_p, n_q), (cnt, wit) in sorted(recs.items()):
            total = n_p * p + n_q * q + (16 - n_p - n_q)
            if total != 16:
                violations += cnt
                parent = Cell(lvl, wit[1], wit[0])
                err = abs(total - 16) * density(parent, params) / 16 ** child_level
                if err > max_err:
                    max_err = err
                if witness is None:
                    witness = (lvl, parent.col, parent.row)
    mass = total_mass(L, params, be)
    if fault is not None and fault.level <= L:
        cell = Cell(fault.level, fault.col, fault.row)
        w_true = weight_word(cell, params)[fault.level - 1].value
        mass += (1 - w_true) * density(cell.parent(), params) / 16 ** fault.level
    return MeasureReport(depth=L, total_mass=mass, violations=violations,
                         max_child_sum_error=max_err, witness=witness)


def _patch_fault_records(recs: dict, fault: Fault, params: Params) -> dict:
    """Replace the faulted parent's child-weight record, as a corrupted
    sweep would have reported it."""
    parent = Cell(fault.level - 1, fault.col // 4, fault.row // 4)
    n_p = n_q = 0
    for ch in parent.children():
        kind = weight_word(ch, params)[fault.level - 1].kind
        n_p += kind == "p"
        n_q += kind == "q"
    faulted_kind = weight_word(Cell(fault.level, fault.col, fault.row),
                               params)[fault.level - 1].kind
    new = (n_p - (faulted_kind == "p"), n_q - (faulted_kind == "q"))
    old = (n_p, n_q)
    recs = dict(recs)
    cnt, wit = recs[old]
    if cnt == 1:
        del recs[old]
    else:
        recs[old] = (cnt - 1, wit)
    wc = (parent.row, parent.col)
    if new in recs:
        recs[new] = (recs[new][0] + 1, wc)
    else:
        recs[new] = (1, wc)
    return recs


def naive_children_check(L: int, params: Params) -> int:
    """Oracle: count parents whose children masses do not sum to the parent
    mass, by direct Fraction enumeration (small L only)."""
    if 16 ** L > 16 ** 4:
        raise SweepTooLarge("naive oracle is limited to L <= 4")
    bad = 0
    for lvl in range(L):
        side = 4 ** lvl
        for col in range(side):
            for row in range(side):
                parent = Cell(lvl, col, row)
                s = sum((mu_cell(ch, params) for ch in parent.children()),
                        Fraction(0))
                if s != mu_cell(parent, params):
                    bad += 1
    return bad
