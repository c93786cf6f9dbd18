# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sweep backend.

Mirrors ``fatgraph.kernels._py`` exactly: same signatures, same aggregated
dictionaries, same witness scan order (right, up, up-right, up-left; row
major within each direction).
"""

import numpy as np

cimport numpy as cnp

BACKEND_NAME = "compiled"


cdef inline int wcode(int s, int a) nogil:
    if s == 0:
        return 0
    if s == 1:
        return 1 + a
    return 2 - a


def exponent_matrices(row_states, col_bits):
    """Per-cell density exponents (U = #p-weights, V = #q-weights)."""
    cdef cnp.int8_t[:, ::1] rs = np.ascontiguousarray(row_states, dtype=np.int8)
    cdef cnp.uint8_t[:, ::1] cb = np.ascontiguousarray(col_bits, dtype=np.uint8)
    cdef Py_ssize_t R = rs.shape[0]
    cdef Py_ssize_t S = rs.shape[1]
    cdef Py_ssize_t C = cb.shape[0]
    U_arr = np.zeros((R, C), dtype=np.uint8)
    V_arr = np.zeros((R, C), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] U = U_arr
    cdef cnp.uint8_t[:, ::1] V = V_arr
    cdef Py_ssize_t r, c, s
    cdef int st, a, cu, cv
    with nogil:
        for r in range(R):
            for c in range(C):
                cu = 0
                cv = 0
                for s in range(S):
                    st = rs[r, s]
                    if st == 0:
                        continue
                    a = cb[c, s]
                    if (st == 1) == (a == 1):
                        cv += 1
                    else:
                        cu += 1
                U[r, c] = <cnp.uint8_t> cu
                V[r, c] = <cnp.uint8_t> cv
    return U_arr, V_arr


def pair_stats(row_states, col_bits, U, V, workers=1):
    """Aggregate all adjacent same-level pairs; see the python backend."""
    cdef cnp.int8_t[:, ::1] rs = np.ascontiguousarray(row_states, dtype=np.int8)
    cdef cnp.uint8_t[:, ::1] cb = np.ascontiguousarray(col_bits, dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] u = np.ascontiguousarray(U, dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] v = np.ascontiguousarray(V, dtype=np.uint8)
    cdef Py_ssize_t R = rs.shape[0]
    cdef Py_ssize_t S = rs.shape[1]
    cdef Py_ssize_t C = cb.shape[0]
    cdef int span = 2 * <int> S + 1
    cdef Py_ssize_t n_keys = 2 * span * span * (S + 1)
    counts_arr = np.zeros(n_keys, dtype=np.int64)
    wit_arr = np.full((n_keys, 4), -1, dtype=np.int64)
    cdef cnp.int64_t[::1] counts = counts_arr
    cdef cnp.int64_t[:, ::1] wit = wit_arr
    cdef Py_ssize_t r, c, s, key
    cdef int d, corner, du, dv, div, ra, ca, rb, cb2, wa, wb
    with nogil:
        for d in range(4):
            corner = 1 if d >= 2 else 0
            for r in range(R):
                for c in range(C):
                    if d == 0:      # right
                        if c + 1 >= C:
                            continue
                        ra = <int> r; ca = <int> c; rb = <int> r; cb2 = <int> c + 1
                    elif d == 1:    # up
                        if r + 1 >= R:
                            continue
                        ra = <int> r; ca = <int> c; rb = <int> r + 1; cb2 = <int> c
                    elif d == 2:    # up-right
                        if r + 1 >= R or c + 1 >= C:
                            continue
                        ra = <int> r; ca = <int> c; rb = <int> r + 1; cb2 = <int> c + 1
                    else:           # up-left
                        if r + 1 >= R or c + 1 >= C:
                            continue
                        ra = <int> r; ca = <int> c + 1; rb = <int> r + 1; cb2 = <int> c
                    du = <int> u[ra, ca] - <int> u[rb, cb2]
                    dv = <int> v[ra, ca] - <int> v[rb, cb2]
                    div = 0
                    for s in range(S):
                        wa = wcode(rs[ra, s], cb[ca, s])
                        wb = wcode(rs[rb, s], cb[cb2, s])
                        if wa != wb:
                            div += 1
                    key = (((corner * span + (du + S)) * span
                            + (dv + S)) * (S + 1) + div)
                    if counts[key] == 0:
                        wit[key, 0] = ra
                        wit[key, 1] = ca
                        wit[key, 2] = rb
                        wit[key, 3] = cb2
                    counts[key] += 1
    out = {}
    cdef Py_ssize_t kk
    for kk in range(n_keys):
        if counts_arr[kk]:
            div = <int> (kk % (S + 1))
            dv = <int> ((kk // (S + 1)) % span) - <int> S
            du = <int> ((kk // ((S + 1) * span)) % span) - <int> S
            corner = <int> (kk // ((S + 1) * span * span))
            out[(corner, du, dv, div)] = (
                int(counts_arr[kk]),
                (int(wit_arr[kk, 0]), int(wit_arr[kk, 1]),
                 int(wit_arr[kk, 2]), int(wit_arr[kk, 3])))
    return out


def child_weight_stats(row_states, col_bits, step_pos):
    """Per-parent counts of p- and q-weighted children at one refinement."""
    cdef cnp.int8_t[:, ::1] rs = np.ascontiguousarray(row_states, dtype=np.int8)
    cdef cnp.uint8_t[:, ::1] cb = np.ascontiguousarray(col_bits, dtype=np.uint8)
    cdef Py_ssize_t R = rs.shape[0]
    cdef Py_ssize_t P = R // 4
    if step_pos is None:
        return {(0, 0): (int(P) * int(P), (0, 0))}
    cdef Py_ssize_t sp = step_pos
    counts_arr = np.zeros(17 * 17, dtype=np.int64)
    wit_arr = np.full((17 * 17, 2), -1, dtype=np.int64)
    cdef cnp.int64_t[::1] counts = counts_arr
    cdef cnp.int64_t[:, ::1] wit = wit_arr
    cdef Py_ssize_t pr, pc, i
    cdef int r_up, r_low, c_a, np_, nq, key
    with nogil:
        for pr in range(P):
            r_up = 0
            r_low = 0
            for i in range(4):
                if rs[4 * pr + i, sp] == 1:
                    r_up += 1
                elif rs[4 * pr + i, sp] == 2:
                    r_low += 1
            for pc in range(P):
                c_a = 0
                for i in range(4):
                    c_a += cb[4 * pc + i, sp]
                np_ = r_up * (4 - c_a) + r_low * c_a
                nq = r_up * c_a + r_low * (4 - c_a)
                key = np_ * 17 + nq
                if counts[key] == 0:
                    wit[key, 0] = pr
                    wit[key, 1] = pc
                counts[key] += 1
    out = {}
    cdef Py_ssize_t kk
    for kk in range(17 * 17):
        if counts_arr[kk]:
            out[(int(kk) // 17, int(kk) % 17)] = (
                int(counts_arr[kk]),
                (int(wit_arr[kk, 0]), int(wit_arr[kk, 1])))
    return out
