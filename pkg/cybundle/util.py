import math
import os
from collections.abc import Sequence
from fractions import Fraction
from typing import Any

from loguru import logger


def mod1(x: Fraction) -> Fraction:
    """Representative of x in [0, 1)."""
    return x - (x.numerator // x.denominator)


def mod1_vector(values: Sequence) -> tuple[Fraction, ...]:
    return tuple(mod1(Fraction(v)) for v in values)


def fraction_to_json(x: Fraction) -> list[str]:
    x = Fraction(x)
    return [str(x.numerator), str(x.denominator)]


def fraction_from_json(value: Any) -> Fraction:
    # ["num", "den"] is canonical; plain ints and "p/q" strings are accepted on input
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"rational pair must have two entries, got {value!r}")
        return Fraction(int(value[0]), int(value[1]))
    if isinstance(value, bool) or isinstance(value, float):
        raise ValueError(f"rational values must not be floats or booleans, got {value!r}")
    return Fraction(value)


def lcm_all(values) -> int:
    return math.lcm(1, *(abs(int(v)) for v in values if v))


def env_int(name: str) -> int | None:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return None
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Ignoring {name}={raw!r}: not an integer")
        return None
