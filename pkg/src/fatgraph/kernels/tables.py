"""Shared separable tables feeding both sweep backends.

The per-cell weight at step i factors through two small tables: a per-row
band state (outside band / upper-half band / lower-half band) and a per-column
q-favoured bit.  Rows and columns number only 4^L each, so these tables are
built once in exact arithmetic; the backends combine them over the 16^L cells.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..errors import Straddle
from ..schedule import Params

OUTSIDE = 0
UPPER_BAND = 1
LOWER_BAND = 2


def nonuniform_steps(params: Params, L: int) -> list[int]:
    """Global indices of the non-uniform steps <= L, ascending."""
    out = []
    for k, (m, n) in enumerate(params.stages):
        base = params.M[k]
        for off in range(1, n + 1):
            i = base + m + off
            if i <= L:
                out.append(i)
    return out


def row_band_states(L: int, params: Params) -> np.ndarray:
    """int8 array [4^L, n_steps]: band state of each row at each
    non-uniform step <= L (column order matches :func:`nonuniform_steps`)."""
    steps = nonuniform_steps(params, L)
    pos = {i: idx for idx, i in enumerate(steps)}
    n_rows = 4 ** L
    states = np.zeros((n_rows, len(steps)), dtype=np.int8)
    scale = 4 ** L
    for row in range(n_rows):
        y0 = Fraction(row, scale)
        y1 = Fraction(row + 1, scale)
        b, t = Fraction(0), Fraction(1)
        step = 0
        for k, (m, n) in enumerate(params.stages):
            base = params.M[k]
            step = min(base + m, L)
            if step == L:
                break
            mid = (b + t) / 2
            if y0 < mid < y1:  # pragma: no cover
                raise Straddle(f"row {row} straddles midline at stage {k + 1}")
            upper = y0 >= mid
            shrink = Fraction(0)
            for off in range(1, n + 1):
                i = base + m + off
                if i > L:
                    break
                if off > 1:
                    shrink += Fraction(1, 4 ** (i - 1))
                if upper:
                    lo, hi = mid + shrink, t - shrink
                else:
                    lo, hi = b + shrink, mid - shrink
                if lo <= y0 and y1 <= hi:
                    states[row, pos[i]] = UPPER_BAND if upper else LOWER_BAND
                elif not (y1 <= lo or y0 >= hi):
                    raise Straddle(
                        f"row {row} straddles the band of step {i}")
                step = i
            if step == L:
                break
            gap = params.rect_gap(k + 1)
            u_lo, u_hi = mid + gap, t - gap
            l_lo, l_hi = b + gap, mid - gap
            if u_lo <= y0 and y1 <= u_hi:
                b, t = u_lo, u_hi
            elif l_lo <= y0 and y1 <= l_hi:
                b, t = l_lo, l_hi
            elif (y1 <= l_lo or y0 >= u_hi
                  or (y1 <= u_lo and y0 >= l_hi)):
                break  # left-over strip: every later state stays OUTSIDE
            else:  # pragma: no cover
                raise Straddle(f"row {row} straddles a rectangle boundary")
    return states


def col_a_bits(L: int, params: Params) -> np.ndarray:
    """uint8 array [4^L, n_steps]: whether each column's step-i digit lies
    in the q-favoured set {1, 2}."""
    steps = nonuniform_steps(params, L)
    cols = np.arange(4 ** L, dtype=np.int64)
    bits = np.empty((4 ** L, len(steps)), dtype=np.uint8)
    for idx, i in enumerate(steps):
        digits = (cols >> (2 * (L - i))) & 3
        bits[:, idx] = ((digits == 1) | (digits == 2)).astype(np.uint8)
    return bits
