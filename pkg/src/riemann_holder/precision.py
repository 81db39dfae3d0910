"""Working precision: numeric contexts, exact conversions, error-carrying values."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

DEFAULT_DIGITS = 40
FLOAT_DIGITS = 15


class PrecisionError(ValueError):
    """Raised when the configured working precision cannot meet a request."""

    def __init__(self, message: str, needed_digits: int):
        super().__init__(f"{message} (needs {needed_digits} digits)")
        self.needed_digits = needed_digits


def default_digits() -> int:
    env = os.environ.get("RIEMANN_PRECISION")
    return int(env) if env else DEFAULT_DIGITS


@lru_cache(maxsize=None)
def _mp_context(digits: int):
    ctx = mpmath.MPContext()
    ctx.dps = digits
    return ctx


def context(digits: int):
    """Float context for <= 15 digits, otherwise a private mpmath context."""
    if digits <= FLOAT_DIGITS:
        return mpmath.fp
    return _mp_context(digits)


def kernel_context(needed: float, digits: int | None = None):
    """Cheapest context that offers ``needed`` digits, capped by ``digits``."""
    digits = default_digits() if digits is None else digits
    needed_int = math.ceil(needed)
    if needed_int > digits:
        raise PrecisionError("working precision insufficient", needed_int)
    return context(FLOAT_DIGITS if needed_int <= FLOAT_DIGITS else digits)


def context_digits(ctx) -> int:
    return ctx.dps


def cancellation_digits(h) -> float:
    """Digits of headroom the increment at step h needs: 5 + (5/4) log10(1/|h|)."""
    return 5 + 1.25 * max(0.0, -_log10_abs(h))


def _log10_abs(x) -> float:
    if isinstance(x, Fraction):
        if x == 0:
            return -math.inf
        return math.log10(abs(x.numerator)) - math.log10(x.denominator)
    return math.log10(abs(float(x))) if float(x) != 0 else _log10_abs(to_fraction(x))


def to_fraction(x) -> Fraction:
    """Exact rational value of an int, float, Fraction, mpf, or numeric string."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, float)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if hasattr(x, "as_fraction"):
        return x.as_fraction()
    if isinstance(x, mpmath.mpf) or type(x).__name__ == "mpf":
        man, exp = x.man_exp
        man = int(man)
        return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2**-exp)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def from_fraction(ctx, x: Fraction):
    if ctx is mpmath.fp:
        return x.numerator / x.denominator
    return ctx.convert(x)


def real_of(ctx, x):
    if isinstance(x, Fraction):
        return from_fraction(ctx, x)
    return ctx.convert(x)


@dataclass(frozen=True)
class ComplexHP:
    """A complex value at some working precision plus an absolute error bound."""

    value: object
    err: float

    @property
    def real(self):
        return self.value.real

    @property
    def imag(self):
        return self.value.imag

    def __complex__(self):
        return complex(self.value)

    def __add__(self, other: "ComplexHP") -> "ComplexHP":
        return ComplexHP(self.value + other.value, self.err + other.err)

    def __sub__(self, other: "ComplexHP") -> "ComplexHP":
        return ComplexHP(self.value - other.value, self.err + other.err)

    def scaled(self, factor) -> "ComplexHP":
        return ComplexHP(self.value * factor, self.err * abs(factor))
