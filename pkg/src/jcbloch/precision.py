"""Certified fractional parts of huge multiples of square roots.

The Diophantine filter needs cos(2*pi*q*sqrt(u)) for integers q with up to
~50 decimal digits, where double-precision argument reduction is hopeless.
The whole computation is done in exact integer arithmetic: sqrt(u) is scaled
by a power of ten, floored with the integer square root, multiplied by q and
reduced mod the scale.  The residual interval is one-sided and has width
q / 10**digits, so a budget of digits10(q) + 20 certifies the fractional part
to 1e-10 measured around the circle.  Results are reproducible bit for bit
because no floating-point library is involved until the final division.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainError, PrecisionError

__all__ = [
    "PrecisionBudget",
    "digits10",
    "isqrt_floor",
    "frac_of_surd_multiple",
    "cos_two_pi_frac",
]

# Certified absolute error (mod 1) of frac_of_surd_multiple.
FRAC_ERROR_BOUND = 1e-10


def digits10(n: int) -> int:
    """Number of decimal digits of |n| (1 for n = 0)."""
    return len(str(abs(n))) if n else 1


@dataclass(frozen=True)
class PrecisionBudget:
    """Working precision in decimal digits for one surd reduction."""

    decimal_digits: int

    def __post_init__(self) -> None:
        if self.decimal_digits < 1:
            raise ValueError(f"decimal_digits must be >= 1, got {self.decimal_digits!r}")

    @classmethod
    def for_multiplier(cls, q: int) -> "PrecisionBudget":
        """Default rule: digits of q plus 20 guard digits.

        The absolute error in q*sqrt(u) is q times the error in sqrt(u), so
        20 guard digits leave ten orders of magnitude of headroom over the
        certified 1e-10 bound.
        """
        return cls(digits10(q) + 20)


def isqrt_floor(n: int) -> int:
    """Exact floor(sqrt(n)) for arbitrary nonnegative integers."""
    if n < 0:
        raise DomainError(f"isqrt_floor requires n >= 0, got {n}")
    return math.isqrt(n)


@lru_cache(maxsize=4096)
def _scaled_sqrt(u_num: int, u_den: int, digits: int) -> int:
    """floor(sqrt(u_num/u_den) * 10**digits), exactly."""
    scale = 10**digits
    return math.isqrt(u_num * scale * scale // u_den)


def _rational_sqrt(u_num: int, u_den: int) -> tuple[int, int] | None:
    """(a, c) with sqrt(u_num/u_den) = a/c in lowest terms, or None if irrational."""
    g = math.gcd(u_num, u_den)
    num, den = u_num // g, u_den // g
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return rn, rd
    return None


def frac_of_surd_multiple(
    u_num: int, u_den: int, q: int, budget: PrecisionBudget | None = None
) -> float:
    """Fractional part of q * sqrt(u_num/u_den), certified to 1e-10 (mod 1).

    For a perfect square of a rational the result is the exact rational
    fractional part.  Otherwise the one-sided enclosure described in the
    module docstring applies; PrecisionError is raised if the budget cannot
    certify the bound rather than returning an uncertified digit.  The error
    is measured around the circle: a true value just below 1 may be reported
    as a value just above 0, which is transparent to the periodic consumers.
    """
    if u_num < 0:
        raise DomainError(f"u_num must be >= 0, got {u_num}")
    if u_den <= 0:
        raise DomainError(f"u_den must be > 0, got {u_den}")
    if q < 0:
        raise DomainError(f"q must be >= 0, got {q}")

    rational = _rational_sqrt(u_num, u_den)
    if rational is not None:
        a, c = rational
        return (q * a % c) / c

    budget = budget or PrecisionBudget.for_multiplier(q)
    d = budget.decimal_digits
    # One guard digit on top of the certified bound: (q+1)/10**d <= 1e-11.
    if (q + 1) * 10**11 > 10**d:
        raise PrecisionError(
            f"budget of {d} digits cannot certify {FRAC_ERROR_BOUND:g} for q with "
            f"{digits10(q)} digits; need at least {digits10(q) + 11}"
        )
    scale = 10**d
    s = _scaled_sqrt(u_num, u_den, d)
    value = (q * s) % scale / scale
    # Big-int division is correctly rounded; fold the half-ulp case at 1.0.
    return 0.0 if value >= 1.0 else value


def cos_two_pi_frac(x: float) -> float:
    """cos(2*pi*x) for x in [0, 1), exact at the quarter-period points.

    Reduces x to a quarter turn with an exact dyadic subtraction before
    calling libm, so x = 0, 0.25, 0.5, 0.75 give 1, 0, -1, 0 exactly.
    """
    if not 0.0 <= x < 1.0:
        raise DomainError(f"x must lie in [0, 1), got {x!r}")
    quarter_turns = round(4.0 * x)
    r = x - quarter_turns / 4.0  # exact: |r| <= 1/8 and n/4 is dyadic
    angle = math.tau * r
    mode = quarter_turns % 4
    if mode == 0:
        return math.cos(angle)
    if mode == 1:
        return -math.sin(angle)
    if mode == 2:
        return -math.cos(angle)
    return math.sin(angle)
