"""Exact-rational helpers: scoring never goes through floating point."""

from __future__ import annotations

from fractions import Fraction


def format_exact(value: Fraction | int) -> str:
    """Render a rational exactly: terminating decimals as decimals, the rest
    as ``p/q``."""
    value = Fraction(value)
    num, den = value.numerator, value.denominator
    if den == 1:
        return str(num)
    twos = fives = 0
    rest = den
    while rest % 2 == 0:
        rest //= 2
        twos += 1
    while rest % 5 == 0:
        rest //= 5
        fives += 1
    if rest != 1:
        return f"{num}/{den}"
    digits = max(twos, fives)
    scaled = abs(num) * 10**digits // den
    text = str(scaled).rjust(digits + 1, "0")
    whole, frac = text[:-digits], text[-digits:].rstrip("0")
    sign = "-" if num < 0 else ""
    return f"{sign}{whole}.{frac}" if frac else f"{sign}{whole}"


def parse_probability(value) -> Fraction | None:
    """Parse a JSON probability (number or ``"p/q"`` string) exactly.

    Floats go through their decimal repr, so ``0.3`` means 3/10, not the
    binary float. Returns None when the value is not a probability in [0, 1].
    """
    try:
        if isinstance(value, bool):
            return None
        if isinstance(value, int):
            prob = Fraction(value)
        elif isinstance(value, float):
            prob = Fraction(str(value))
        elif isinstance(value, str):
            prob = Fraction(value)
        else:
            return None
    except (ValueError, ZeroDivisionError):
        return None
    if not 0 <= prob <= 1:
        return None
    return prob
