"""Exact 4-adic doubling-measure construction with a heavy function graph.

A probability measure on the unit square is built by redistributing
Lebesgue measure in 4-adic steps with weights p and q = 2 - p.  The package
evaluates the construction exactly (arbitrary-precision rationals
throughout), verifies its doubling behaviour by exhaustive finite-depth
sweeps, computes the exact mass kept by the graph approximation, and
exports figure-grade artifacts.
"""

from .grid import Cell, RectQ, a_membership, adjacent, cell_bounds
from .rat import Rat, parse_rat, rat_str
from .schedule import Params, Phase, phase_of_step, plan_schedule, validate

__all__ = [
    "Cell", "Params", "Phase", "Rat", "RectQ", "a_membership", "adjacent",
    "cell_bounds", "parse_rat", "phase_of_step", "plan_schedule", "rat_str",
    "validate",
]

__version__ = "0.1.0"
