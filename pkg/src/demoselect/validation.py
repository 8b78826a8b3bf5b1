"""Input validation helpers used across the package.

Small, composable checks that raise :class:`ValidationError` with a message
naming the offending argument, in the spirit of scikit-learn's validation
utilities.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

from .errors import ValidationError


def check_finite_floats(values: Sequence[float], name: str) -> tuple[float, ...]:
    """Coerce to a tuple of floats, rejecting NaN and infinities."""
    try:
        out = tuple(float(v) for v in values)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{name} must be a sequence of numbers: {exc}") from None
    for v in out:
        if not math.isfinite(v):
            raise ValidationError(f"{name} contains a non-finite value ({v!r})")
    return out


def check_unit_interval(x: float, name: str) -> float:
    x = float(x)
    if not math.isfinite(x) or not 0.0 <= x <= 1.0:
        raise ValidationError(f"{name} must lie in [0, 1], got {x!r}")
    return x


def check_positive_int(x: int, name: str) -> int:
    if not isinstance(x, int) or isinstance(x, bool) or x < 1:
        raise ValidationError(f"{name} must be a positive integer, got {x!r}")
    return x


def check_choice(value: str, choices: Sequence[str], name: str) -> str:
    if value not in choices:
        raise ValidationError(f"{name} must be one of {', '.join(choices)}; got {value!r}")
    return value


def check_nonempty_str(value: str, name: str) -> str:
    if not isinstance(value, str) or not value:
        raise ValidationError(f"{name} must be a non-empty string, got {value!r}")
    return value
