"""Construction parameters and stage bookkeeping.

A parameter set is a base weight ``p`` in (0,1) (with ``q = 2 - p`` always
derived, never stored independently) plus a finite list of stages
``(m_k, n_k)`` of odd integers >= 3: each stage first spreads mass uniformly
for ``m_k`` 4-adic steps and then redistributes it non-uniformly for ``n_k``
steps.  ``M_k`` is the running total number of steps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import OutOfRange, RejectEps, RejectHeight, RejectP, RejectParity, UsageError
from .rat import parse_rat, rat_str


@dataclass(frozen=True)
class Params:
    """Validated construction parameters.  Build via :func:`validate`."""

    p: Fraction
    stages: tuple  # tuple of (m_k, n_k)
    M: tuple       # cumulative step counts, M[0] == 0
    heights: tuple  # construction-rectangle heights h_0..h_K

    @property
    def q(self) -> Fraction:
        return 2 - self.p

    @property
    def K(self) -> int:
        return len(self.stages)

    @property
    def total_steps(self) -> int:
        return self.M[-1]

    def rect_gap(self, k: int) -> Fraction:
        """Margin 4^-(M_{k-1}+m_k) between a level-(k-1) rectangle and its
        level-k children (1-based stage k)."""
        m_k = self.stages[k - 1][0]
        return Fraction(1, 4 ** (self.M[k - 1] + m_k))

    def to_json_dict(self) -> dict:
        return {
            "p": rat_str(self.p),
            "stages": [{"m": m, "n": n} for (m, n) in self.stages],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


@dataclass(frozen=True)
class Phase:
    """Position of a global step index inside its stage."""

    stage: int      # 1-based
    kind: str       # "uniform" | "nonuniform"
    offset: int     # 1..m_k for uniform, 1..n_k for nonuniform
    step: int       # the global index back-reference


def validate(p, stages) -> Params:
    """Check and normalize raw parameters.

    Raises RejectP / RejectParity / RejectHeight when the base weight, the
    stage parities, or the height recursion fail.
    """
    p = parse_rat(p)
    if not (0 < p < 1):
        raise RejectP(f"p must satisfy 0 < p < 1, got {rat_str(p)}")
    norm = []
    for pair in stages:
        if isinstance(pair, dict):
            m, n = pair["m"], pair["n"]
        else:
            m, n = pair
        for v in (m, n):
            if not isinstance(v, int) or v < 3 or v % 2 == 0:
                raise RejectParity(f"stage entries must be odd integers >= 3, got {v}")
        norm.append((m, n))
    if not norm:
        raise RejectParity("at least one (m, n) stage is required")
    M = [0]
    for m, n in norm:
        M.append(M[-1] + m + n)
    heights = [Fraction(1)]
    for k, (m, _n) in enumerate(norm):
        gap = Fraction(1, 4 ** (M[k] + m))
        h = heights[-1] / 2 - 2 * gap
        if h <= 0:
            raise RejectHeight(
                f"stage {k + 1}: rectangle height {h} is not positive")
        heights.append(h)
    return Params(p=p, stages=tuple(norm), M=tuple(M), heights=tuple(heights))


def params_from_json(doc) -> Params:
    """Parse the JSON config format {"p": "num/den", "stages": [{"m", "n"}]}."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    try:
        return validate(doc["p"], doc["stages"])
    except KeyError as exc:
        raise UsageError(f"config missing key: {exc}") from exc


def phase_of_step(i: int, params: Params) -> Phase:
    """The unique phase containing global step ``i`` (1-based)."""
    if i < 1:
        raise OutOfRange(f"step index must be >= 1, got {i}")
    if i > params.total_steps:
        raise OutOfRange(
            f"step {i} beyond the configured {params.total_steps} steps")
    for k, (m, n) in enumerate(params.stages, start=1):
        base = params.M[k - 1]
        if i <= base + m:
            return Phase(stage=k, kind="uniform", offset=i - base, step=i)
        if i <= base + m + n:
            return Phase(stage=k, kind="nonuniform", offset=i - base - m, step=i)
    raise AssertionError("unreachable")


def _tail_term(p: Fraction, n: int) -> Fraction:
    pq = p * (2 - p)
    return Fraction(1, 2) * pq ** ((n - 1) // 2)


def plan_schedule(epsilon, K: int) -> Params:
    """Pick parameters meeting a target slack ``epsilon``.

    The base weight is ``p = max(2/(2+eps), 1/2)`` so the grid-level mass
    ratio q/p stays below ``1 + eps``.  Each stage gets the geometric budget
    ``eps * 2^-(k+2)`` for both its discarded-mass and left-over terms;
    ``n_k`` and ``m_k`` are the smallest odd integers >= 3 meeting their
    budgets, which keeps the total graph-mass bound above ``1 - eps`` for
    any number of stages.
    """
    epsilon = parse_rat(epsilon)
    if epsilon <= 0:
        raise RejectEps(f"epsilon must be positive, got {rat_str(epsilon)}")
    if K < 1:
        raise UsageError(f"need at least one stage, got {K}")
    p = max(Fraction(2, 2 + epsilon) if epsilon <= 2 else Fraction(1, 2),
            Fraction(1, 2))
    stages = []
    for k in range(1, K + 1):
        budget = epsilon * Fraction(1, 2 ** (k + 2))
        m = 3
        while Fraction(1, 4 ** (m - 1)) > budget:
            m += 2
        n = 3
        while _tail_term(p, n) > budget:
            n += 2
        stages.append((m, n))
    return validate(p, stages)
