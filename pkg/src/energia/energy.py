"""Representation functions and energy functionals.

The fast path computes r_s by iterated sparse self-convolution of the
indicator (squaring where the arity allows), entirely in exact
arithmetic.  An independent brute-force oracle enumerates all 2s-tuples
literally and must agree with the fast path on every input.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional

import numpy as np

from . import precision
from .errors import BadArityError, EmptySetError, BadParamsError, OverflowGuardError, TooLargeError
from .sets import IntSet

ADDITIVE = "additive"
MULTIPLICATIVE = "multiplicative"
MIXED = "mixed"

_COUNTER_LIMIT = 2**63

_OPS = {ADDITIVE: lambda a, b: a + b, MULTIPLICATIVE: lambda a, b: a * b}


@dataclass(frozen=True)
class RepFunction:
    """Sparse value -> multiplicity map for r_s (sums) or q_s (products)."""

    support: dict
    s: int
    mode: str

    def __post_init__(self):
        if self.s < 1:
            raise BadParamsError("arity s must be >= 1")
        if self.mode not in (ADDITIVE, MULTIPLICATIVE):
            raise BadParamsError(f"unknown mode {self.mode!r}")

    def total(self) -> int:
        return sum(self.support.values())

    def energy_count(self) -> int:
        return sum(v * v for v in self.support.values())

    def sup(self) -> int:
        return max(self.support.values())

    def values_sorted(self):
        return sorted(self.support)

    def __getitem__(self, n) -> int:
        return self.support.get(n, 0)


@dataclass(frozen=True)
class EnergyValue:
    """An exact energy count together with its log_|A| exponent."""

    count: int
    s: int
    mode: str
    exponent: Optional[object] = field(default=None, compare=False)

    def __int__(self):
        return self.count


def _convolve(f: dict, g: dict, op) -> dict:
    out = {}
    for a, ca in f.items():
        for b, cb in g.items():
            k = op(a, b)
            out[k] = out.get(k, 0) + ca * cb
    return out


def _self_convolution(indicator: dict, s: int, op) -> dict:
    # binary powering over the convolution semiring; deterministic order
    acc = None
    power = indicator
    k = s
    while k:
        if k & 1:
            acc = dict(power) if acc is None else _convolve(acc, power, op)
        k >>= 1
        if k:
            power = _convolve(power, power, op)
    return acc


def _guard_counts(size: int, s: int):
    if size >= 2 and size**s >= _COUNTER_LIMIT:
        raise OverflowGuardError(f"|A|^s = {size}^{s} exceeds the 64-bit multiplicity guard")


def rep_function(A: IntSet, s: int, mode: str = ADDITIVE) -> RepFunction:
    """Exact r_s (additive) or q_s (multiplicative) of A."""
    if len(A) == 0:
        raise EmptySetError("rep_function of empty set")
    if s < 1:
        raise BadParamsError("s must be >= 1")
    if mode not in _OPS:
        raise BadParamsError(f"unknown mode {mode!r}")
    _guard_counts(len(A), s)
    indicator = {a: 1 for a in A}
    return RepFunction(_self_convolution(indicator, s, _OPS[mode]), s, mode)


def _exponent(count: int, size: int):
    if size < 2 or count <= 0:
        return None
    return precision.log2(count) / precision.log2(size)


def energy(A: IntSet, s: int, mode: str = ADDITIVE) -> EnergyValue:
    """E_s(A) or M_s(A), exactly, as sum of squared multiplicities."""
    r = rep_function(A, s, mode)
    count = r.energy_count()
    return EnergyValue(count, s, mode, _exponent(count, len(A)))


def sup_rep(A: IntSet, s: int, mode: str = ADDITIVE) -> int:
    """max_n r_s(n)."""
    return rep_function(A, s, mode).sup()


def mixed_energy(sets, mode: str = ADDITIVE) -> EnergyValue:
    """E_s(A_1, ..., A_2s) / M_s(...): tuples with equal half-sums.

    Computed as the inner product of the two s-fold convolutions.
    """
    sets = list(sets)
    if len(sets) == 0 or len(sets) % 2 != 0:
        raise BadArityError("need an even, positive number of sets")
    if mode not in _OPS:
        raise BadParamsError(f"unknown mode {mode!r}")
    for X in sets:
        if len(X) == 0:
            raise EmptySetError("mixed_energy over an empty factor")
    s = len(sets) // 2
    op = _OPS[mode]

    def half(group):
        f = {a: 1 for a in group[0]}
        for X in group[1:]:
            f = _convolve(f, {a: 1 for a in X}, op)
        return f

    left = half(sets[:s])
    right = half(sets[s:])
    count = sum(c * right.get(n, 0) for n, c in left.items())
    size = min(len(X) for X in sets)
    return EnergyValue(count, s, mode, _exponent(count, size))


# -- independent brute-force oracle ----------------------------------------

ORACLE_GUARD = 10**8
_PY_ORACLE_CAP = 200_000


def energy_oracle(A: IntSet, s: int, mode: str = ADDITIVE, guard: int = ORACLE_GUARD) -> EnergyValue:
    """Energy by literal enumeration of all 2s-tuples.

    Small inputs run nested Python loops; larger ones enumerate every
    (s-tuple, s-tuple) pair in numpy batches.  Both visit each 2s-tuple
    individually; no convolution is shared with the fast path.
    """
    if len(A) == 0:
        raise EmptySetError("energy_oracle of empty set")
    if s < 1:
        raise BadParamsError("s must be >= 1")
    if mode not in _OPS:
        raise BadParamsError(f"unknown mode {mode!r}")
    n_tuples = len(A) ** (2 * s)
    if n_tuples > guard:
        raise TooLargeError(f"|A|^(2s) = {n_tuples} exceeds the oracle guard {guard}")
    op = _OPS[mode]
    if n_tuples <= _PY_ORACLE_CAP or not _fits_int64(A, s, mode):
        count = 0
        for tup in product(A.elements, repeat=2 * s):
            lhs = tup[0]
            for x in tup[1:s]:
                lhs = op(lhs, x)
            rhs = tup[s]
            for x in tup[s + 1 :]:
                rhs = op(rhs, x)
            if lhs == rhs:
                count += 1
    else:
        count = _numpy_oracle(A, s, mode)
    return EnergyValue(count, s, mode, _exponent(count, len(A)))


def _fits_int64(A: IntSet, s: int, mode: str) -> bool:
    m = max(abs(a) for a in A)
    if m == 0:
        return True
    bound = m * s if mode == ADDITIVE else m**s
    return bound < 2**62


def _numpy_oracle(A: IntSet, s: int, mode: str) -> int:
    vals = np.array(A.elements, dtype=np.int64)
    sums = vals
    for _ in range(s - 1):
        grid = sums[:, None] + vals[None, :] if mode == ADDITIVE else sums[:, None] * vals[None, :]
        sums = grid.reshape(-1)
    # every (s-tuple, s-tuple) pair compared individually, in row batches
    count = 0
    step = max(1, (1 << 22) // max(1, sums.size))
    for i in range(0, sums.size, step):
        block = sums[i : i + step]
        count += int(np.sum(block[:, None] == sums[None, :]))
    return count
