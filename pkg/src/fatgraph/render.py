"""Figure-grade raster exports (binary portable graymap / pixmap).

Pixel values encode log-density linearly between the minimum and maximum
density at the chosen depth; densities are monomials p^u q^v so log space
shows the band structure.  PGM/PPM keep the golden files codec-free and
bit-exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import ResolutionMismatch
from .graph import chosen_range_for_column
from .schedule import Params


@dataclass(frozen=True)
class HeatmapSpec:
    depth: int
    pixels: int
    overlay_k: int | None = None  # outline the kept level-k rectangles (P6)


def _gray_map(U: np.ndarray, V: np.ndarray, params: Params,
              hist_keys: list) -> np.ndarray:
    """Tone-map exponent matrices to 8-bit gray.

    gray = round(255 * (log d - log d_min) / (log d_max - log d_min)) with a
    mid-gray fallback when only one density occurs.
    """
    p, q = params.p, params.q
    values = sorted(Fraction(p) ** u * Fraction(q) ** v for u, v in hist_keys)
    d_min, d_max = values[0], values[-1]
    if d_min == d_max:
        return np.full(U.shape, 128, dtype=np.uint8)
    lp, lq = math.log(float(p)), math.log(float(q))
    ld = U.astype(np.float64) * lp + V.astype(np.float64) * lq
    lo = math.log(float(d_min))
    hi = math.log(float(d_max))
    gray = np.rint(255.0 * (ld - lo) / (hi - lo))
    return np.clip(gray, 0, 255).astype(np.uint8)


def render_heatmap(spec: HeatmapSpec, params: Params, backend=None) -> bytes:
    """Render the density field at the given depth.

    ``pixels`` must divide 4^depth; each pixel shows the cell containing its
    center, top row at y near 1.  With ``overlay_k`` the output is a P6
    pixmap with kept rectangles flagged in the red channel, otherwise a P5
    graymap.  Output bytes are a deterministic function of the inputs.
    """
    L, pixels = spec.depth, spec.pixels
    side = 4 ** L
    if pixels < 1 or pixels > side or side % pixels != 0:
        raise ResolutionMismatch(
            f"pixels={pixels} must divide the 4^{L} = {side} cell grid")
    be = backend or kernels.backend
    rows = kernels.row_band_states(L, params)
    cols = kernels.col_a_bits(L, params)
    U, V = be.exponent_matrices(rows, cols)
    keys = np.unique(U.astype(np.int64) * 256 + V.astype(np.int64))
    hist_keys = [(int(k) // 256, int(k) % 256) for k in keys.tolist()]
    step = side // pixels
    centers = np.arange(pixels) * step + step // 2
    sample_rows = centers[::-1]  # image row 0 shows the top of the square
    grid = _gray_map(U[np.ix_(sample_rows, centers)],
                     V[np.ix_(sample_rows, centers)], params, hist_keys)
    if spec.overlay_k is None:
        return b"P5\n%d %d\n255\n" % (pixels, pixels) + grid.tobytes()
    mask = _kept_mask(spec.overlay_k, L, centers, sample_rows, params)
    rgb = np.stack([grid, grid, grid], axis=-1)
    rgb[mask, 0] = 255
    return b"P6\n%d %d\n255\n" % (pixels, pixels) + rgb.tobytes()


def _kept_mask(k: int, L: int, centers: np.ndarray, sample_rows: np.ndarray,
               params: Params) -> np.ndarray:
    """Boolean [pixel_row, pixel_col] mask of kept level-k rectangles."""
    side = 4 ** L
    ranges: dict = {}
    y_lo = np.empty(len(centers), dtype=object)
    y_hi = np.empty(len(centers), dtype=object)
    for j, c in enumerate(centers.tolist()):
        x = Fraction(2 * c + 1, 2 * side)
        col_k = min(int(x * 4 ** params.M[k]), 4 ** params.M[k] - 1)
        if col_k not in ranges:
            ranges[col_k] = chosen_range_for_column(col_k, k, params)
        y_lo[j], y_hi[j] = ranges[col_k]
    mask = np.zeros((len(sample_rows), len(centers)), dtype=bool)
    for i, r in enumerate(sample_rows.tolist()):
        y = Fraction(2 * r + 1, 2 * side)
        for j in range(len(centers)):
            mask[i, j] = y_lo[j] <= y < y_hi[j]
    return mask
