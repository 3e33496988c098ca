"""Greedy low-energy decompositions.

Two dual loops: `decompose` strips multiplicatively-rich mass into B
until the residual's multiplicative energy is small, certifying each
extracted piece's additive energy; `decompose_eric` runs the mirrored
loop with the roles of the two energies exchanged.  `com2_budget` gives
the halving-plus-deletion iteration bound that caps either loop.

Stopping and extraction certificates are exact: rational threshold
exponents are decided by clearing denominators, never by floats.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath

from . import precision
from .bsg import CALIBRATED, PAPER, SUBSET_BRANCH, kp_pipeline
from .checks import CheckReport, digest
from .energy import ADDITIVE, MULTIPLICATIVE, energy
from .errors import (
    BadAdversaryError,
    BadParamsError,
    ExtractorFailedError,
    ParameterTooLargeError,
    PrecisionError,
    StageCollapseError,
    TooLargeError,
)
from .sets import IntSet, iterated_product_set

_MAX_EXECUTABLE_ARITY = 64
_EXHAUSTIVE_CAP = 16


def _frac(x, name) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(str(x))
    raise BadParamsError(f"{name} must be a rational number")


@dataclass(frozen=True)
class DecomposeConfig:
    k: object = Fraction(1)
    s: int = 2  # multiplicative arity
    q: int = 4  # additive certificate arity (first loop)
    s1: int = 2  # additive stopping arity (dual loop)
    s2: int = 2  # multiplicative certificate arity (dual loop)
    mode: str = CALIBRATED
    extractor: str = "kp-multiplicative"
    thresholds: dict = field(default_factory=dict)  # exponent overrides
    frac_c: Fraction = Fraction(1, 2)  # declared extraction fraction
    frac_Cc: Fraction = Fraction(1, 4)
    small_set_bound: int = 4  # residual size below which the dual loop stops
    m: int = 2  # product-set arity reported by the dichotomy

    def __post_init__(self):
        object.__setattr__(self, "k", _frac(self.k, "k"))
        object.__setattr__(self, "frac_c", _frac(self.frac_c, "c"))
        object.__setattr__(self, "frac_Cc", _frac(self.frac_Cc, "Cc"))
        if self.k < 1:
            raise BadParamsError("need k >= 1")
        for name in ("s", "q", "s1", "s2"):
            v = getattr(self, name)
            if v < 2 or v % 2 != 0:
                raise BadParamsError(f"{name} must be even and >= 2")
        if self.mode not in (PAPER, CALIBRATED):
            raise BadParamsError(f"unknown mode {self.mode!r}")
        for name, exp in self.thresholds.items():
            e = _frac(exp, name)
            if not 0 < e < 2 * max(self.s, self.q, self.s1, self.s2):
                raise BadParamsError(f"threshold {name} outside (0, 2s)")
        for name in ("s", "q", "s1", "s2"):
            if getattr(self, name) > _MAX_EXECUTABLE_ARITY:
                raise ParameterTooLargeError(f"{name} = {getattr(self, name)} not executable")

    def exponent(self, name, default) -> Fraction:
        return _frac(self.thresholds.get(name, default), name)


@dataclass
class Decomposition:
    B: IntSet
    C: IntSet
    trace: list  # (D_i, CheckReport, threshold exponent)
    budget: int
    iterations_used: int
    stop_report: Optional[CheckReport] = None
    failed: bool = False


def sign_split(A: IntSet):
    """Partition A into positive, negative and zero parts."""
    pos = [a for a in A if a > 0]
    neg = [a for a in A if a < 0]
    zero = [a for a in A if a == 0]
    return IntSet(pos), IntSet(neg), IntSet(zero)


# -- iteration budget --------------------------------------------------------


def com2_budget(n: int, c, Cc) -> int:
    """floor(2(log2 n + 2) + Cc^-1 n^c / (2^c - 1))."""
    c = _frac(c, "c")
    Cc = _frac(Cc, "Cc")
    if n < 1:
        raise BadParamsError("need n >= 1")
    if not 0 < c < 1 or Cc <= 0:
        raise BadParamsError("need 0 < c < 1 and Cc > 0")
    with mpmath.workprec(precision.precision_bits()):
        cv = precision.mpf(c)
        val = 2 * (mpmath.log(n, 2) + 2) + precision.mpf(1 / Cc) * mpmath.mpf(n) ** cv / (
            mpmath.mpf(2) ** cv - 1
        )
        f = mpmath.floor(val)
        if val != f and val - f < mpmath.mpf(2) ** -(precision.precision_bits() // 2):
            raise PrecisionError("budget value too close to an integer to certify")
        return int(f)


def min_deletion(size: int, c, Cc) -> int:
    """ceil(Cc size^(1-c)), exactly, for rational c and Cc."""
    c = _frac(c, "c")
    Cc = _frac(Cc, "Cc")
    if size < 1:
        return 0
    e = 1 - c
    p, q = e.numerator, e.denominator
    # smallest d >= 1 with (d / Cc)^q >= size^p
    rhs = Cc.numerator**q * size**p
    d = 1
    while d**q * Cc.denominator**q < rhs:
        d += 1
    return d


def com2_simulate(n: int, c, Cc, adversary) -> int:
    """Run the halve-or-delete process; adversary(size) gives the deletion.

    Each step removes the adversary's count (at least ceil(Cc size^(1-c)),
    else BadAdversary) and then halves the remainder, matching the
    two-phase accounting behind the budget formula.
    """
    if n < 1:
        raise BadParamsError("need n >= 1")
    size = n
    steps = 0
    budget = com2_budget(n, c, Cc)
    while size > 1:
        d = adversary(size)
        if d < min_deletion(size, c, Cc):
            raise BadAdversaryError(f"deleted {d} < minimum at size {size}")
        size = max(0, size - d)
        steps += 1
        if steps > budget + n:
            raise AssertionError("simulation runaway")  # pragma: no cover
    return steps


def minimal_adversary(c, Cc):
    """The slowest admissible deletion rule."""
    return lambda size: min_deletion(size, c, Cc)


# -- multiplicative dichotomy ------------------------------------------------


@dataclass(frozen=True)
class SmallEnergy:
    report: CheckReport


@dataclass(frozen=True)
class StructuredSubset:
    B: IntSet
    product_report: CheckReport


def mult_dichotomy(A: IntSet, k, s: int, m: int = 2, mode: str = CALIBRATED):
    """Either M_s(A) < |A|^(2s-k) (certified exactly) or a subset B with
    small m-fold product set, found by the multiplicative pipeline."""
    k = _frac(k, "k")
    if len(A) == 0 or min(A) <= 0:
        raise BadParamsError("need a non-empty set of positive integers")
    if s < 2 or s % 2 != 0 or m < 1:
        raise BadParamsError("need even s >= 2 and m >= 1")
    n = len(A)
    M_s = energy(A, s, MULTIPLICATIVE).count
    cmp = precision.cmp_count_power(M_s, n, 2 * s - k)
    if cmp < 0 and n > 1:
        return SmallEnergy(
            CheckReport(
                "ntm2-small", M_s, f"|A|^{2 * s - k}", True, None, digest(A, k, s)
            )
        )
    if n == 1:
        B = A
    else:
        res = kp_pipeline(A, max(4, s), 0.05, mode=mode, energy_mode=MULTIPLICATIVE)
        if res.branch != SUBSET_BRANCH:
            raise StageCollapseError("dichotomy", "pipeline yielded no subset")
        B = res.A_prime
    span = len(iterated_product_set(B, m, 0))
    holds = precision.cmp_count_power(span, n, 3 * k) <= 0
    report = CheckReport(
        "ntm2-product", span, f"|A|^{3 * k}", holds, None, digest(A, k, s, m)
    )
    return StructuredSubset(B, report)


# -- extractors --------------------------------------------------------------


def _energy_cert(D: IntSet, arity_half: int, exponent: Fraction, mode: str, name: str):
    e = energy(D, arity_half, mode).count
    holds = precision.cmp_count_power(e, len(D), exponent) <= 0
    return CheckReport(name, e, f"|D|^{exponent}", holds, None, digest(D, arity_half, exponent, mode))


def _extract_kp(A_i: IntSet, cfg: DecomposeConfig, cert_mode: str):
    """Pipeline-based extraction: the multiplicative dichotomy feeds the
    first loop (additively-certified D), the additive pipeline the dual."""
    if cert_mode == ADDITIVE:
        out = mult_dichotomy(A_i, cfg.k, cfg.s, cfg.m, cfg.mode)
        if isinstance(out, SmallEnergy):
            raise StageCollapseError("extract", "residual already small")
        return out.B
    res = kp_pipeline(A_i, max(4, cfg.s1), 0.05, mode=cfg.mode, energy_mode=ADDITIVE)
    if res.branch != SUBSET_BRANCH:
        raise StageCollapseError("extract", "pipeline yielded no subset")
    return res.A_prime


def _extract_exhaustive(A_i: IntSet, cfg: DecomposeConfig, cert_mode: str):
    if len(A_i) > _EXHAUSTIVE_CAP:
        raise TooLargeError(f"exhaustive extractor limited to |A| <= {_EXHAUSTIVE_CAP}")
    # guaranteed fraction by construction: only subsets of size >= |A|^(1-c)
    min_size = max(1, min_deletion(len(A_i), cfg.frac_c, Fraction(1)))
    arity_half = (cfg.q if cert_mode == ADDITIVE else cfg.s2) // 2
    elems = list(A_i)
    best = None
    for mask in range(1, 1 << len(elems)):
        members = tuple(elems[i] for i in range(len(elems)) if mask >> i & 1)
        if len(members) < min_size:
            continue
        e = energy(IntSet(members), arity_half, cert_mode).count
        key = (e, len(members), members)
        if best is None or key < best:
            best = key
    return IntSet(best[2])


_EXTRACTORS = {"kp-multiplicative": _extract_kp, "kp-additive": _extract_kp, "exhaustive": _extract_exhaustive}


# -- the two loops -----------------------------------------------------------


def _loop(A_pos, cfg, stop_mode, stop_arity, stop_exp, cert_mode, cert_arity_half, cert_exp, cert_name, small_stop):
    residual = A_pos
    B_parts = []
    trace = []
    iterations = 0
    failed = False
    extract = _EXTRACTORS.get(cfg.extractor)
    if extract is None:
        raise BadParamsError(f"unknown extractor {cfg.extractor!r}")
    budget = com2_budget(max(1, len(A_pos)), cfg.frac_c, cfg.frac_Cc)

    def stopped(X):
        if len(X) <= max(small_stop, 1):
            return True
        M = energy(X, stop_arity, stop_mode).count
        return precision.cmp_count_power(M, len(X), stop_exp) < 0

    while not stopped(residual):
        try:
            D = extract(residual, cfg, cert_mode)
        except (StageCollapseError, TooLargeError) as exc:
            failed = True
            trace.append((None, CheckReport("extract-failed", str(exc), None, False, None, digest(residual)), cert_exp))
            break
        report = _energy_cert(D, cert_arity_half, cert_exp, cert_mode, cert_name)
        if not report.holds or len(D) == 0:
            failed = True
            trace.append((D, report, cert_exp))
            break
        trace.append((D, report, cert_exp))
        B_parts.extend(D)
        residual = IntSet(a for a in residual if a not in set(D))
        iterations += 1
        if iterations > budget:
            raise ExtractorFailedError(iterations, "iteration budget exceeded")

    stop_report = None
    if not failed:
        if len(residual) <= small_stop or len(residual) <= 1:
            stop_report = CheckReport(
                f"{cert_name}-stop", len(residual), f"|C| <= {max(small_stop, 1)}", True, None, digest(residual)
            )
        else:
            M = energy(residual, stop_arity, stop_mode).count
            holds = precision.cmp_count_power(M, len(residual), stop_exp) < 0
            stop_report = CheckReport(
                f"{cert_name}-stop", M, f"|C|^{stop_exp}", holds, None, digest(residual, stop_exp)
            )
    return B_parts, residual, trace, budget, iterations, stop_report, failed


def decompose(A: IntSet, cfg: DecomposeConfig) -> Decomposition:
    """B = multiplicatively-rich extractions (each certified additively
    small at arity q/2), C = residual with small M_s."""
    if len(A) == 0:
        raise BadParamsError("need a non-empty set")
    pos, neg, zero = sign_split(A)
    stop_exp = cfg.exponent("stop", 2 * cfg.s - cfg.k)
    cert_exp = cfg.exponent("extract", cfg.q - Fraction(cfg.q, 4))

    B_all, C_all, trace_all = [], list(zero), []
    budget = com2_budget(len(A), cfg.frac_c, cfg.frac_Cc)
    iterations = 0
    failed = False
    stop_report = None
    for part, flip in ((pos, 1), (neg, -1)):
        if len(part) == 0:
            continue
        work = part if flip == 1 else IntSet(-a for a in part)
        Bp, Cp, tr, _, it, sr, fl = _loop(
            work, cfg, MULTIPLICATIVE, cfg.s, stop_exp, ADDITIVE, cfg.q // 2, cert_exp, "gemn", 0
        )
        B_all.extend(flip * b for b in Bp)
        C_all.extend(flip * c for c in Cp)
        trace_all.extend(tr)
        iterations += it
        failed = failed or fl
        if sr is not None and (stop_report is None or not sr.holds):
            stop_report = sr
    assert iterations <= budget
    B, C = IntSet(B_all), IntSet(C_all)
    assert set(B) | set(C) == set(A) and not (set(B) & set(C))
    return Decomposition(B, C, trace_all, budget, iterations, stop_report, failed)


def decompose_eric(A: IntSet, cfg: DecomposeConfig) -> Decomposition:
    """Dual loop: stop when E_{s1}(residual) is small or the residual is
    tiny; each extracted D_i certified multiplicatively small at s2."""
    if len(A) == 0:
        raise BadParamsError("need a non-empty set")
    pos, neg, zero = sign_split(A)
    if len(neg) > 0 or len(zero) > 0:
        raise BadParamsError("dual loop needs positive elements")
    stop_exp = cfg.exponent("stop", 2 * cfg.s1 - cfg.k)
    cert_exp = cfg.exponent("extract", 2 * cfg.s2 - cfg.k)
    cfg_dual = cfg if cfg.extractor != "kp-multiplicative" else _with_extractor(cfg, "kp-additive")
    Bp, Cp, tr, budget, it, sr, fl = _loop(
        pos, cfg_dual, ADDITIVE, cfg.s1, stop_exp, MULTIPLICATIVE, cfg.s2 // 2, cert_exp, "eric", cfg.small_set_bound
    )
    assert it <= budget
    B, C = IntSet(Bp), Cp
    assert set(B) | set(C) == set(A) and not (set(B) & set(C))
    return Decomposition(B, C, tr, budget, it, sr, fl)


def _with_extractor(cfg: DecomposeConfig, name: str) -> DecomposeConfig:
    return DecomposeConfig(
        cfg.k, cfg.s, cfg.q, cfg.s1, cfg.s2, cfg.mode, name, dict(cfg.thresholds),
        cfg.frac_c, cfg.frac_Cc, cfg.small_set_bound, cfg.m,
    )
