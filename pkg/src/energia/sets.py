"""Exact finite-set arithmetic: IntSet/RatSet, iterated sumsets and
product sets, and canonical generators for the standard example sets.

All values are arbitrary-precision (Python int / Fraction); product and
quotient sets live in exact rationals so that no collision is ever
spurious.  Every object is immutable and every operation is pure.
"""

from fractions import Fraction

from .errors import (
    BadParamsError,
    DivisionByZeroElementError,
    EmptySetError,
    ZeroArityError,
)


class _SortedSet:
    """Immutable strictly-increasing sequence of exact values."""

    __slots__ = ("elements",)

    def __init__(self, values):
        self.elements = tuple(sorted(set(values)))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return self._bsearch(x)

    def _bsearch(self, x):
        lo, hi = 0, len(self.elements)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.elements[mid] < x:
                lo = mid + 1
            else:
                hi = mid
        return lo < len(self.elements) and self.elements[lo] == x

    def __eq__(self, other):
        return type(self) is type(other) and self.elements == other.elements

    def __hash__(self):
        return hash((type(self).__name__, self.elements))

    def __repr__(self):
        return f"{type(self).__name__}({list(self.elements)!r})"


class IntSet(_SortedSet):
    """Finite set of arbitrary-precision integers."""

    def __init__(self, values):
        values = list(values)
        for v in values:
            if not isinstance(v, int):
                raise BadParamsError(f"IntSet elements must be int, got {type(v).__name__}")
        super().__init__(values)


class RatSet(_SortedSet):
    """Finite set of exact rationals (stored reduced, denominators > 0)."""

    def __init__(self, values):
        super().__init__(Fraction(v) for v in values)


def make_set(values) -> IntSet:
    """Deduplicate and sort a list of integers into an IntSet."""
    return IntSet(values)


def _pair_sumset(xs, ys):
    return {x + y for x in xs for y in ys}


def _fold_sumset(base, s):
    # binary addition chain: sumsets satisfy (aX) + (bX) = (a+b)X
    acc = None
    power = set(base)
    k = s
    times = 1
    acc_times = 0
    while k:
        if k & 1:
            acc = set(power) if acc is None else _pair_sumset(acc, power)
            acc_times += times
        k >>= 1
        if k:
            power = _pair_sumset(power, power)
            times *= 2
    return acc


def iterated_sumset(A: IntSet, m: int, n: int) -> IntSet:
    """mA - nA, the m-fold sumset minus the n-fold sumset of A."""
    if m < 0 or n < 0:
        raise BadParamsError("m and n must be non-negative")
    if m == 0 and n == 0:
        raise ZeroArityError("m = n = 0")
    if len(A) == 0:
        raise EmptySetError("iterated_sumset of empty set")
    if m == 0:
        return IntSet(-x for x in _fold_sumset(A.elements, n))
    plus = _fold_sumset(A.elements, m)
    if n == 0:
        return IntSet(plus)
    minus = _fold_sumset(A.elements, n)
    return IntSet(p - q for p in plus for q in minus)


def _pair_prodset(xs, ys):
    return {x * y for x in xs for y in ys}


def _fold_prodset(base, s):
    acc = None
    power = set(base)
    k = s
    while k:
        if k & 1:
            acc = set(power) if acc is None else _pair_prodset(acc, power)
        k >>= 1
        if k:
            power = _pair_prodset(power, power)
    return acc


def iterated_product_set(A: IntSet, m: int, n: int) -> RatSet:
    """A^(m) / A^(n) as exact rationals; n = 0 gives the plain product set."""
    if m < 0 or n < 0:
        raise BadParamsError("m and n must be non-negative")
    if m == 0 and n == 0:
        raise ZeroArityError("m = n = 0")
    if len(A) == 0:
        raise EmptySetError("iterated_product_set of empty set")
    if n >= 1 and 0 in A.elements:
        raise DivisionByZeroElementError("0 in A with n >= 1")
    if m == 0:
        return RatSet(Fraction(1, q) for q in _fold_prodset(A.elements, n))
    num = _fold_prodset(A.elements, m)
    if n == 0:
        return RatSet(num)
    den = _fold_prodset(A.elements, n)
    return RatSet(Fraction(p, q) for p in num for q in den)


# -- canonical generators ---------------------------------------------------


def ap(start: int, step: int, n: int) -> IntSet:
    """Arithmetic progression {start, start+step, ..., start+(n-1)step}."""
    if n < 1 or step == 0:
        raise BadParamsError("need n >= 1 and step != 0")
    return IntSet(start + i * step for i in range(n))


def gp(start: int, ratio: int, n: int) -> IntSet:
    """Geometric progression {start * ratio**i : 0 <= i < n}."""
    if n < 1 or ratio == 0 or start == 0:
        raise BadParamsError("need n >= 1, start != 0, ratio != 0")
    return IntSet(start * ratio**i for i in range(n))


def powers(k: int, n: int) -> IntSet:
    """{1, 2**k, ..., n**k}: the model (k-1)-convex image."""
    if n < 1 or k < 1:
        raise BadParamsError("need n >= 1 and k >= 1")
    return IntSet(i**k for i in range(1, n + 1))


def interval(n: int) -> IntSet:
    """{1, ..., n}."""
    if n < 1:
        raise BadParamsError("need n >= 1")
    return IntSet(range(1, n + 1))


def mixed(n: int) -> IntSet:
    """{1, ..., n} together with {n**2, ..., n**n} (exact big integers).

    The standard witness that both energies can be near-maximal at once.
    """
    if n < 1:
        raise BadParamsError("need n >= 1")
    return IntSet(list(range(1, n + 1)) + [n**j for j in range(2, n + 1)])


def poly_image(coeffs, base: IntSet) -> IntSet:
    """{p(i) : i in base} for p with integer coefficients (low order first)."""
    coeffs = list(coeffs)
    if not coeffs or not all(isinstance(c, int) for c in coeffs):
        raise BadParamsError("coeffs must be a non-empty list of integers")
    if len(base) == 0:
        raise EmptySetError("poly_image over empty base set")

    def p(x):
        acc = 0
        for c in reversed(coeffs):
            acc = acc * x + c
        return acc

    return IntSet(p(i) for i in base)


GENERATORS = {
    "ap": ap,
    "gp": gp,
    "powers": powers,
    "interval": interval,
    "mixed": mixed,
    "poly_image": poly_image,
}


def generate(kind: str, **params) -> IntSet:
    """Dispatch to one of the named generators."""
    try:
        fn = GENERATORS[kind]
    except KeyError:
        raise BadParamsError(f"unknown generator kind {kind!r}") from None
    return fn(**params)
