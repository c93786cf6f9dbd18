"""Sweep backends: compiled core with a pure-Python fallback.

The hot kernels (per-cell exponent matrices, adjacent-pair aggregation,
per-parent child-weight counts) exist twice: a Cython extension
(``fatgraph.kernels._core``) and a numpy implementation
(``fatgraph.kernels._py``).  The compiled core is used when importable;
set FATGRAPH_BACKEND=python or FATGRAPH_BACKEND=compiled to force one.
Both produce identical outputs (checked by the test suite) so every exact
result is independent of the backend.
"""

import os

from . import _py
from .tables import col_a_bits, nonuniform_steps, row_band_states

try:
    from . import _core
except ImportError:
    _core = None


def available_backends() -> dict:
    out = {"python": _py}
    if _core is not None:
        out["compiled"] = _core
    return out


def get_backend(name: str | None = None):
    """Resolve a backend module by name, env var, or default preference."""
    name = name or os.environ.get("FATGRAPH_BACKEND")
    if name:
        try:
            return available_backends()[name]
        except KeyError:
            raise ImportError(f"backend {name!r} not available") from None
    return _core if _core is not None else _py


backend = get_backend()

__all__ = [
    "available_backends", "backend", "col_a_bits", "get_backend",
    "nonuniform_steps", "row_band_states",
]
