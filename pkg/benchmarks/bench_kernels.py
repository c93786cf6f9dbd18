"""Compare the sweep backends on the exhaustive depth-6 workload.

Usage: python benchmarks/bench_kernels.py [--depth N] [--repeat R]

Times the three hot kernels (exponent matrices, adjacent-pair aggregation,
child-weight counts) on each available backend and verifies along the way
that their outputs are identical.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from fatgraph.kernels import available_backends, col_a_bits, row_band_states
from fatgraph.schedule import validate


def _time(fn, repeat: int):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depth", type=int, default=6)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    params = validate("1/2", [(3, 3)])
    rows = row_band_states(args.depth, params)
    cols = col_a_bits(args.depth, params)
    backends = available_backends()
    print(f"depth {args.depth} ({4 ** args.depth}x{4 ** args.depth} cells), "
          f"best of {args.repeat} runs, backends: {', '.join(backends)}")

    reference: dict = {}
    for name, be in backends.items():
        t_exp, (U, V) = _time(lambda: be.exponent_matrices(rows, cols),
                              args.repeat)
        t_pair, pairs = _time(lambda: be.pair_stats(rows, cols, U, V),
                              args.repeat)
        t_child, childs = _time(
            lambda: be.child_weight_stats(rows, cols, rows.shape[1] - 1),
            args.repeat)
        print(f"  {name:>9}: exponent_matrices {t_exp * 1e3:9.1f} ms | "
              f"pair_stats {t_pair * 1e3:9.1f} ms | "
              f"child_weight_stats {t_child * 1e3:9.1f} ms")
        if not reference:
            reference.update(U=U, V=V, pairs=pairs, childs=childs)
        else:
            assert np.array_equal(U, reference["U"])
            assert np.array_equal(V, reference["V"])
            assert pairs == reference["pairs"]
            assert childs == reference["childs"]
    if len(backends) > 1:
        print("  outputs identical across backends")


if __name__ == "__main__":
    main()
