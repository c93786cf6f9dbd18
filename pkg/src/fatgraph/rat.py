"""Exact rational scalars.

Every measure, weight and bound in this package is a ``fractions.Fraction``;
no floating point enters any primary computation.  This module only adds the
wire format: rationals serialize as ``"num/den"`` in lowest terms.
"""

from fractions import Fraction

from .errors import UsageError

Rat = Fraction


def parse_rat(text) -> Fraction:
    """Parse ``"num/den"`` or a plain integer string into a Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not a rational: {text!r}") from exc


def rat_str(x) -> str:
    """Serialize a rational as ``num/den`` (integers as ``n/1``)."""
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"
