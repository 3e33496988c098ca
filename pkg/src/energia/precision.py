"""High-precision comparison helpers.

Every pass/fail decision in the library is either an exact integer
comparison or goes through :func:`guarded_cmp`, which refuses to decide
when the margin falls below the certified precision bound instead of
silently mis-certifying.
"""

import os
from fractions import Fraction

import mpmath

from .errors import PrecisionError

PRECISION_ENV = "ENERGIA_PRECISION_BITS"
DEFAULT_PRECISION_BITS = 256


def precision_bits() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return DEFAULT_PRECISION_BITS
    try:
        bits = int(raw)
    except ValueError:
        return DEFAULT_PRECISION_BITS
    return max(64, bits)


def mpf(x):
    """Convert int/Fraction/float to an mpf at the configured precision."""
    with mpmath.workprec(precision_bits()):
        if isinstance(x, Fraction):
            return mpmath.mpf(x.numerator) / mpmath.mpf(x.denominator)
        return mpmath.mpf(x)


def log2(x):
    """log base 2 of a positive int/Fraction/float, high precision."""
    with mpmath.workprec(precision_bits()):
        if isinstance(x, Fraction):
            return mpmath.log(mpmath.mpf(x.numerator), 2) - mpmath.log(
                mpmath.mpf(x.denominator), 2
            )
        return mpmath.log(mpmath.mpf(x), 2)


def guarded_cmp(lhs, rhs, guard_bits=None) -> int:
    """Three-way compare of two mpf/numbers with a margin guard.

    Returns -1, 0 or +1.  Exact equality is fine; a nonzero difference
    smaller than 2**-guard_bits relative to the operand scale raises
    PrecisionError.
    """
    bits = precision_bits()
    if guard_bits is None:
        guard_bits = bits // 2
    with mpmath.workprec(bits):
        a = mpmath.mpf(lhs) if not isinstance(lhs, mpmath.mpf) else lhs
        b = mpmath.mpf(rhs) if not isinstance(rhs, mpmath.mpf) else rhs
        d = a - b
        if d == 0:
            return 0
        scale = max(abs(a), abs(b), mpmath.mpf(1))
        if abs(d) < scale * mpmath.mpf(2) ** (-guard_bits):
            raise PrecisionError(
                f"comparison margin below 2^-{guard_bits} of scale; "
                f"raise {PRECISION_ENV} to certify"
            )
        return 1 if d > 0 else -1


def cmp_count_power(count: int, base: int, exponent) -> int:
    """Three-way compare of an exact count against base**exponent.

    Rational exponents are decided by exact integer arithmetic (clearing
    the denominator); irrational/float exponents go through the guarded
    log-space comparison.
    """
    if count < 0 or base < 0:
        raise ValueError("count and base must be non-negative")
    if isinstance(exponent, int):
        exponent = Fraction(exponent)
    if isinstance(exponent, Fraction) and exponent.denominator <= 64:
        p, q = exponent.numerator, exponent.denominator
        lhs = count**q
        rhs = base**p if p >= 0 else Fraction(1, base**-p)
        return (lhs > rhs) - (lhs < rhs)
    if count == 0:
        return -1 if base > 0 else 0
    if base == 0:
        return 1
    if base == 1:
        return (count > 1) - (count < 1)
    return guarded_cmp(log2(count), mpf(exponent) * log2(base))
