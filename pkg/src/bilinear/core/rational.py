"""Exact rational scalars and their pydantic field types.

Every matrix entry, strategy coordinate and payoff in the package is a
``fractions.Fraction``. ``Fraction`` already keeps numerator and denominator in
lowest terms with a positive denominator, so canonical form holds after every
arithmetic operation.

On the wire a rational is an integer (bare JSON number) or a ``"p/q"`` string.
"""

import math
import re
from fractions import Fraction
from typing import Annotated, Any, Iterable

from pydantic import PlainSerializer, PlainValidator, WithJsonSchema

_RATIONAL_RE = re.compile(r"[+-]?\d+(?:/\d+)?")


def parse_rational(value: Any) -> Fraction:
    """Convert an int, Fraction or ``"p/q"`` string into a Fraction.

    Floats are rejected: they cannot be represented exactly.

    Raises:
        ValueError: If the value is not an exact rational.
    """
    if isinstance(value, bool):
        raise ValueError(f"Booleans are not rationals: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not _RATIONAL_RE.fullmatch(text):
            raise ValueError(f"Not an exact rational literal: {value!r}")
        try:
            return Fraction(text)
        except ZeroDivisionError as exc:
            raise ValueError(f"Zero denominator in {value!r}") from exc
    raise ValueError(f"Not an exact rational: {value!r} ({type(value).__name__})")


def format_rational(value: Fraction) -> int | str:
    """Integers serialise bare, everything else as ``"p/q"`` in lowest terms."""
    if value.denominator == 1:
        return value.numerator
    return f"{value.numerator}/{value.denominator}"


def integer_scale(values: Iterable[Fraction]) -> int:
    """Least common multiple of the denominators (1 for an empty input)."""
    scale = 1
    for value in values:
        scale = math.lcm(scale, value.denominator)
    return scale


def is_integral(value: Fraction) -> bool:
    """True when the fraction has denominator one."""
    return value.denominator == 1


Rational = Annotated[
    Fraction,
    PlainValidator(parse_rational),
    PlainSerializer(format_rational),
    WithJsonSchema(
        {
            "anyOf": [
                {"type": "integer"},
                {"type": "string", "pattern": r"^[+-]?\d+(/\d+)?$"},
            ],
            "description": "Exact rational: integer or 'p/q' string",
        }
    ),
]

RatVector = tuple[Rational, ...]
RatMatrix = tuple[RatVector, ...]
