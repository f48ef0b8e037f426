"""
Small helpers shared across the package: exact rational arithmetic for costs
and durations, and quote normalisation for DSL sources.
"""

import math
from fractions import Fraction
from typing import Union

Rational = Fraction
Number = Union[int, float, str, Fraction]

_QUOTES = {
    "“": '"',
    "”": '"',
    "„": '"',
    "``": '"',
    "''": '"',
}


def to_rational(value: Number) -> Fraction:
    """
    Converts an int, float, decimal string or "p/q" string to an exact Fraction.

    Floats go through their shortest repr so that 0.1 becomes 1/10 rather than
    the binary expansion.

    Raises:
        ValueError: If the value is not finite or cannot be parsed.
    """
    if isinstance(value, bool):
        raise ValueError(f"Not a number: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"Not a finite number: {value!r}")
        return Fraction(repr(value))
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"Not a rational number: {value!r}") from e


def format_rational(value: Fraction) -> str:
    """
    Formats a Fraction as "5" or "3/2".
    """
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def normalize_quotes(text: str) -> str:
    """
    Replaces typographic and LaTeX-style quotes with plain double quotes.
    """
    for quote, plain in _QUOTES.items():
        text = text.replace(quote, plain)
    return text
