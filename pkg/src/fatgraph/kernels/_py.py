"""Pure-Python (numpy) sweep backend.

Same contracts as the compiled core in ``_core.pyx``; selected at import
time when the extension is unavailable or FATGRAPH_BACKEND=python.
All aggregation is deterministic: directions are scanned in a fixed order
and witnesses are first occurrences in row-major order, independent of the
chunking used to bound memory.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"

# witness scan order for adjacent pairs: right, up, up-right, up-left
_DIRECTIONS = ("H", "V", "D1", "D2")


def exponent_matrices(row_states: np.ndarray, col_bits: np.ndarray):
    """Per-cell density exponents (U = #p-weights, V = #q-weights),
    indexed [row, col]."""
    n_rows, n_steps = row_states.shape
    n_cols = col_bits.shape[0]
    U = np.zeros((n_rows, n_cols), dtype=np.uint8)
    V = np.zeros((n_rows, n_cols), dtype=np.uint8)
    for idx in range(n_steps):
        up = row_states[:, idx] == 1
        low = row_states[:, idx] == 2
        a = col_bits[:, idx].astype(bool)
        U += (up[:, None] & ~a[None, :]) | (low[:, None] & a[None, :])
        V += (up[:, None] & a[None, :]) | (low[:, None] & ~a[None, :])
    return U, V


def _weight_codes(states_chunk: np.ndarray, col_bits: np.ndarray) -> np.ndarray:
    """int8 [rows, cols, steps] weight code per cell and step:
    0 = weight 1, 1 = weight p, 2 = weight q."""
    s = states_chunk[:, None, :]
    a = col_bits[None, :, :].astype(np.int8)
    return ((s == 1) * (1 + a) + (s == 2) * (2 - a)).astype(np.int8)


def _merge(acc: dict, keys: np.ndarray, flat_to_witness) -> None:
    uniq, first, counts = np.unique(keys, return_index=True, return_counts=True)
    for key, idx, cnt in zip(uniq.tolist(), first.tolist(), counts.tolist()):
        rec = acc.get(key)
        if rec is None:
            acc[key] = [int(cnt), flat_to_witness(idx)]
        else:
            rec[0] += int(cnt)


def _encode(corner: int, du: np.ndarray, dv: np.ndarray,
            div: np.ndarray) -> np.ndarray:
    return ((np.int64(corner) << 24)
            | ((du.astype(np.int64) + 128) << 16)
            | ((dv.astype(np.int64) + 128) << 8)
            | div.astype(np.int64))


def pair_stats(row_states: np.ndarray, col_bits: np.ndarray,
               U: np.ndarray, V: np.ndarray, workers: int = 1) -> dict:
    """Aggregate all adjacent same-level pairs.

    Returns {(corner, du, dv, divergence): (count, (rowA, colA, rowB, colB))}
    where corner is 0 for edge-adjacent pairs and 1 for corner-adjacent
    (diagonal) pairs, du, dv are the exponent differences of the pair's
    densities, divergence counts the steps where the two weights differ,
    and the witness is the first pair encountered in scan order.
    """
    n_rows = row_states.shape[0]
    n_cols = col_bits.shape[0]
    iU = U.astype(np.int16)
    iV = V.astype(np.int16)
    acc: dict = {}
    chunk = max(4, min(512, -(-n_rows // max(1, workers))))
    for direction in _DIRECTIONS:
        corner = 1 if direction in ("D1", "D2") else 0
        for r0 in range(0, n_rows, chunk):
            r1 = min(r0 + chunk, n_rows)
            hi = min(r1 + 1, n_rows)  # one extra row for vertical pairs
            W = _weight_codes(row_states[r0:hi], col_bits)
            if direction == "H":
                rows = r1 - r0
                du = iU[r0:r1, :-1] - iU[r0:r1, 1:]
                dv = iV[r0:r1, :-1] - iV[r0:r1, 1:]
                div = (W[:rows, :-1, :] != W[:rows, 1:, :]).sum(axis=2)
                wit = lambda i, w=n_cols - 1, r0=r0: (
                    r0 + i // w, i % w, r0 + i // w, i % w + 1)
            elif hi - r0 < 2:
                continue  # vertical/diagonal pairs need a row above
            elif direction == "V":
                du = iU[r0:hi - 1, :] - iU[r0 + 1:hi, :]
                dv = iV[r0:hi - 1, :] - iV[r0 + 1:hi, :]
                div = (W[:-1, :, :] != W[1:, :, :]).sum(axis=2)
                wit = lambda i, w=n_cols, r0=r0: (
                    r0 + i // w, i % w, r0 + i // w + 1, i % w)
            elif direction == "D1":
                du = iU[r0:hi - 1, :-1] - iU[r0 + 1:hi, 1:]
                dv = iV[r0:hi - 1, :-1] - iV[r0 + 1:hi, 1:]
                div = (W[:-1, :-1, :] != W[1:, 1:, :]).sum(axis=2)
                wit = lambda i, w=n_cols - 1, r0=r0: (
                    r0 + i // w, i % w, r0 + i // w + 1, i % w + 1)
            else:  # D2
                du = iU[r0:hi - 1, 1:] - iU[r0 + 1:hi, :-1]
                dv = iV[r0:hi - 1, 1:] - iV[r0 + 1:hi, :-1]
                div = (W[:-1, 1:, :] != W[1:, :-1, :]).sum(axis=2)
                wit = lambda i, w=n_cols - 1, r0=r0: (
                    r0 + i // w, i % w + 1, r0 + i // w + 1, i % w)
            _merge(acc, _encode(corner, du, dv, div).ravel(), wit)
    return {
        ((key >> 24) & 1, ((key >> 16) & 0xFF) - 128,
         ((key >> 8) & 0xFF) - 128, key & 0xFF):
            (cnt, wit) for key, (cnt, wit) in sorted(acc.items())
    }


def child_weight_stats(row_states: np.ndarray, col_bits: np.ndarray,
                       step_pos) -> dict:
    """Per-parent counts of p- and q-weighted children at one refinement.

    ``row_states``/``col_bits`` are the child-level tables; ``step_pos`` is
    the table column for the refining step, or None when that step is
    uniform.  Returns {(n_p, n_q): (count, (parent_row, parent_col))}.
    """
    n_rows = row_states.shape[0]
    n_parents = n_rows // 4
    if step_pos is None:
        return {(0, 0): (n_parents * n_parents, (0, 0))}
    s = row_states[:, step_pos]
    a = col_bits[:, step_pos].astype(np.int64)
    r_up = (s == 1).reshape(-1, 4).sum(axis=1)
    r_low = (s == 2).reshape(-1, 4).sum(axis=1)
    c_a = a.reshape(-1, 4).sum(axis=1)
    c_na = 4 - c_a
    NP = np.outer(r_up, c_na) + np.outer(r_low, c_a)
    NQ = np.outer(r_up, c_a) + np.outer(r_low, c_na)
    keys = NP * 17 + NQ
    out: dict = {}
    uniq, first, counts = np.unique(keys, return_index=True, return_counts=True)
    for key, idx, cnt in zip(uniq.tolist(), first.tolist(), counts.tolist()):
        out[(int(key) // 17, int(key) % 17)] = (
            int(cnt), (idx // n_parents, idx % n_parents))
    return out
