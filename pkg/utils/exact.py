"""Exact parsing of numeric input values."""
from fractions import Fraction
from typing import Any

from models.errors import InputFormatError


def parse_fraction(value: Any) -> Fraction:
    """Parse "1/3", "0.25", 3, 0.5 or a Fraction into an exact Fraction.

    Floats go through their shortest repr so that 0.3 becomes 3/10.
    """
    if isinstance(value, bool):
        raise InputFormatError(f"Boolean is not a number: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise InputFormatError(f"Cannot parse number {value!r}: {e}") from e
    raise InputFormatError(f"Unsupported numeric value {value!r}")


def format_fraction(value: Fraction) -> str:
    """Inverse of parse_fraction for reports."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
