"""Graph approximation: per-column rectangle selection and its exact mass.

After each stage, every column keeps whichever of the two next-level
rectangles (upper or lower) carries more mass; stage lengths are odd so
there is never a tie.  The kept set at stage k is the running intersection
of these choices; along any vertical line it is a nested sequence of
intervals whose heights halve, so the limit is the graph of a function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .construction import CRect, child_y_ranges
from .errors import DepthExceeded, SweepTooLarge, UsageError, VerificationError
from .measure import sweep_limit
from .rat import rat_str
from .schedule import Params


def _digit(col: int, m_total: int, i: int) -> int:
    """Base-4 digit of a level-``m_total`` column index at step i."""
    return (col // 4 ** (m_total - i)) % 4


def _x_digit(x: Fraction, i: int) -> int:
    """Base-4 digit of a coordinate at step i (x = 1 sticks to the last cell)."""
    side = 4 ** i
    return min(int(Fraction(x) * side), side - 1) % 4


def tail_exact(n: int, p: Fraction) -> Fraction:
    """Exact mass fraction of the minority (discarded) rectangle halves."""
    q = 2 - p
    return sum(math.comb(n, i) * q ** i * p ** (n - i)
               for i in range((n - 1) // 2 + 1)) / Fraction(2 ** n)


def tail_term(n: int, p: Fraction) -> Fraction:
    """Closed-form upper bound (pq)^((n-1)/2) / 2 for :func:`tail_exact`."""
    return Fraction(1, 2) * (p * (2 - p)) ** ((n - 1) // 2)


def _majority_q(digits: list[int], n: int, p: Fraction) -> tuple[bool, int]:
    """Decide upper-vs-lower by counting q-favoured digits, cross-checked
    against the mass-product criterion (squared, to stay rational)."""
    q = 2 - p
    c = sum(1 for d in digits if d in (1, 2))
    by_count = 2 * c > n
    upper_prod = q ** c * p ** (n - c)
    by_product = upper_prod ** 2 > (p * q) ** n
    if by_count != by_product:  # pragma: no cover - the criteria are equivalent
        raise VerificationError(
            f"selection criteria disagree: count {c}/{n} vs product {upper_prod}")
    return by_count, c


def chosen_half(parent: CRect, column: int, params: Params) -> tuple[str, int]:
    """Which half of ``parent`` the given next-level column keeps.

    ``column`` is a level-M_{k+1} column index inside the parent.  Returns
    ("upper" | "lower", count of q-favoured digits among the stage's
    non-uniform steps).
    """
    k = parent.level
    if k + 1 > params.K:
        raise DepthExceeded(f"no stage {k + 1} configured (K={params.K})")
    m, n = params.stages[k]
    m_total = params.M[k + 1]
    if not (parent.col * 4 ** (m + n) <= column < (parent.col + 1) * 4 ** (m + n)):
        raise UsageError(f"column {column} is not inside parent {parent.col}")
    digits = [_digit(column, m_total, i)
              for i in range(params.M[k] + m + 1, m_total + 1)]
    upper, c = _majority_q(digits, n, params.p)
    return ("upper" if upper else "lower"), c


@dataclass(frozen=True)
class FEnclosure:
    """Vertical extent of the kept level-k rectangle over x (nested in the
    level-(k-1) enclosure, height below 2^-k)."""

    x: Fraction
    k: int
    lo: Fraction
    hi: Fraction

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo


def _walk_chosen(digit_at, k: int, params: Params):
    """Shared stage walk: ``digit_at(i)`` supplies the base-4 digit at step
    i; returns (lo, hi) of the kept level-k rectangle."""
    if k > params.K:
        raise DepthExceeded(f"no stage {k} configured (K={params.K})")
    b, t = Fraction(0), Fraction(1)
    for s in range(1, k + 1):
        m, n = params.stages[s - 1]
        base = params.M[s - 1]
        digits = [digit_at(i) for i in range(base + m + 1, base + m + n + 1)]
        upper, _ = _majority_q(digits, n, params.p)
        gap = params.rect_gap(s)
        (u_lo, u_hi), (l_lo, l_hi) = child_y_ranges(b, t, gap)
        b, t = (u_lo, u_hi) if upper else (l_lo, l_hi)
    return b, t


def f_enclosure(x, k: int, params: Params) -> FEnclosure:
    """Nested interval enclosing the limit function's value above x."""
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise UsageError(f"x outside [0,1]: {x}")
    lo, hi = _walk_chosen(lambda i: _x_digit(x, i), k, params)
    return FEnclosure(x=x, k=k, lo=lo, hi=hi)


def chosen_range_for_column(col: int, k: int, params: Params):
    """Kept-rectangle y-range for a level-M_k column index."""
    m_total = params.M[k]
    return _walk_chosen(lambda i: _digit(col, m_total, i), k, params)


# -- exact graph mass ---------------------------------------------------------

def mu_S(k: int, params: Params) -> Fraction:
    """Exact mass of the union of kept level-k rectangles.

    Factorized accounting: each stage keeps the fraction of its rectangles'
    mass that is not left-over (1 - 4*gap/height) and not in the minority
    half (1 - tail_exact); stages multiply because the construction repeats
    identically inside every kept rectangle.
    """
    if k > params.K:
        raise DepthExceeded(f"no stage {k} configured (K={params.K})")
    out = Fraction(1)
    for j in range(1, k + 1):
        _, n = params.stages[j - 1]
        rect_fraction = 1 - 4 * params.rect_gap(j) / params.heights[j - 1]
        out *= rect_fraction * (1 - tail_exact(n, params.p))
    return out


def mu_S_naive(k: int, params: Params, backend=None) -> Fraction:
    """Independent oracle for :func:`mu_S`: enumerate every level-M_k cell,
    test it against the kept rectangles, and add up exact cell masses."""
    L = params.M[k]
    if 16 ** L > sweep_limit():
        raise SweepTooLarge(f"naive enumeration needs 16^{L} cells")
    be = backend or kernels.backend
    rows = kernels.row_band_states(L, params)
    cols = kernels.col_a_bits(L, params)
    U, V = be.exponent_matrices(rows, cols)
    scale = 4 ** L
    by_range: dict = {}
    for col in range(scale):
        lo, hi = chosen_range_for_column(col, k, params)
        by_range.setdefault((lo, hi), []).append(col)
    hist: dict = {}
    for (lo, hi), col_list in sorted(by_range.items()):
        r0, r1 = int(lo * scale), int(hi * scale)
        sub = np.ix_(np.arange(r0, r1), np.asarray(col_list))
        keys = U[sub].astype(np.int64) * 256 + V[sub].astype(np.int64)
        for key, cnt in zip(*np.unique(keys, return_counts=True)):
            hist[int(key)] = hist.get(int(key), 0) + int(cnt)
    p, q = params.p, params.q
    return sum((cnt * p ** (key // 256) * q ** (key % 256)
                for key, cnt in sorted(hist.items())), Fraction(0)) / 16 ** L


# -- quantitative bounds -------------------------------------------------------

@dataclass(frozen=True)
class StageBounds:
    stage: int
    m: int
    n: int
    tail_term: Fraction
    tail_exact: Fraction
    leftover_term: Fraction
    leftover_exact: Fraction

    def to_json_dict(self) -> dict:
        return {
            "stage": self.stage, "m": self.m, "n": self.n,
            "tail_term": rat_str(self.tail_term),
            "tail_exact": rat_str(self.tail_exact),
            "leftover_term": rat_str(self.leftover_term),
            "leftover_exact": rat_str(self.leftover_exact),
        }


@dataclass(frozen=True)
class BoundsLedger:
    stages: tuple
    total: Fraction  # 1 - sum of tail and left-over closed-form terms

    def to_json_dict(self) -> dict:
        return {"stages": [s.to_json_dict() for s in self.stages],
                "total_lower_bound": rat_str(self.total)}


def bounds(params: Params) -> BoundsLedger:
    """Per-stage discarded-mass and left-over terms, exact and closed-form.

    Verifies exact <= closed-form for every stage (a failure means the
    build, not the schedule, is broken).
    """
    p = params.p
    if not p * (2 - p) < 1:  # pragma: no cover - forced by 0 < p < 1
        raise VerificationError("pq must be below 1")
    entries = []
    rect_mass = Fraction(1)  # mass held by all rectangles of the previous level
    total = Fraction(1)
    for j, (m, n) in enumerate(params.stages, start=1):
        t_exact = tail_exact(n, p)
        t_term = tail_term(n, p)
        leftover_fraction = 4 * params.rect_gap(j) / params.heights[j - 1]
        l_exact = rect_mass * leftover_fraction
        l_term = Fraction(1, 4 ** (m - 1))
        if t_exact > t_term or l_exact > l_term:
            raise VerificationError(
                f"stage {j}: exact terms exceed their closed-form bounds")
        entries.append(StageBounds(stage=j, m=m, n=n, tail_term=t_term,
                                   tail_exact=t_exact, leftover_term=l_term,
                                   leftover_exact=l_exact))
        rect_mass *= 1 - leftover_fraction
        total -= t_term + l_term
    return BoundsLedger(stages=tuple(entries), total=total)


# -- exports -------------------------------------------------------------------

@dataclass(frozen=True)
class GraphSample:
    x: Fraction
    lo: Fraction
    hi: Fraction

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2


def sample_graph(k: int, resolution: int, params: Params) -> list[GraphSample]:
    """Enclosures at the centers of a uniform grid of ``resolution`` columns.

    The piecewise-linear curve through the midpoints is a plotting aid only;
    it is not the limit function.
    """
    if resolution < 1:
        raise UsageError(f"resolution must be >= 1, got {resolution}")
    out = []
    for j in range(resolution):
        x = Fraction(2 * j + 1, 2 * resolution)
        enc = f_enclosure(x, k, params)
        out.append(GraphSample(x=x, lo=enc.lo, hi=enc.hi))
    return out


def chosen_rects(k: int, params: Params):
    """Yield (x_lo, x_hi, y_lo, y_hi) for every kept level-k rectangle."""
    m_total = params.M[k]
    width = Fraction(1, 4 ** m_total)
    for col in range(4 ** m_total):
        lo, hi = chosen_range_for_column(col, k, params)
        yield col * width, (col + 1) * width, lo, hi
