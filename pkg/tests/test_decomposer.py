import random
from fractions import Fraction

import pytest

from energia import precision
from energia.decomposer import (
    DecomposeConfig,
    SmallEnergy,
    StructuredSubset,
    com2_budget,
    com2_simulate,
    decompose,
    decompose_eric,
    min_deletion,
    minimal_adversary,
    mult_dichotomy,
    sign_split,
)
from energia.energy import ADDITIVE, MULTIPLICATIVE, energy
from energia.errors import BadAdversaryError, BadParamsError, ParameterTooLargeError
from energia.sets import IntSet, gp, interval


MIX = IntSet(list(range(1, 33)) + [3**i for i in range(16)])
CFG = DecomposeConfig(k=Fraction(6, 5), s=2, q=4, mode="calibrated")


class TestSignSplit:
    def test_mixed(self):
        pos, neg, zero = sign_split(IntSet([-2, 0, 3]))
        assert list(pos) == [3] and list(neg) == [-2] and list(zero) == [0]

    def test_all_positive(self):
        A = interval(5)
        pos, neg, zero = sign_split(A)
        assert pos == A and len(neg) == 0 and len(zero) == 0

    def test_all_negative(self):
        A = IntSet([-1, -2, -3])
        pos, neg, zero = sign_split(A)
        assert neg == A and len(pos) == 0


class TestConfig:
    def test_defaults_valid(self):
        cfg = DecomposeConfig()
        assert cfg.k == 1

    def test_k_below_one(self):
        with pytest.raises(BadParamsError):
            DecomposeConfig(k=Fraction(1, 2))

    def test_odd_arity(self):
        with pytest.raises(BadParamsError):
            DecomposeConfig(s=3)

    def test_threshold_range(self):
        with pytest.raises(BadParamsError):
            DecomposeConfig(thresholds={"stop": 99})

    def test_astronomical_arity(self):
        with pytest.raises(ParameterTooLargeError):
            DecomposeConfig(s=2**10)


class TestCom2:
    def test_budget_16(self):
        assert com2_budget(16, Fraction(1, 2), 1) == 21

    def test_budget_256(self):
        assert com2_budget(256, Fraction(1, 2), 1) == 58

    def test_budget_n1(self):
        assert com2_budget(1, Fraction(1, 2), 1) >= 4
        assert com2_simulate(1, Fraction(1, 2), 1, lambda s: s) == 0

    def test_minimal_simulation_within_budget(self):
        for n in (16, 64, 256):
            for c in (Fraction(1, 4), Fraction(1, 2)):
                steps = com2_simulate(n, c, 1, minimal_adversary(c, 1))
                assert steps <= com2_budget(n, c, 1)

    def test_greedy_adversary(self):
        assert com2_simulate(100, Fraction(1, 2), 1, lambda s: s) == 1

    def test_bad_adversary(self):
        with pytest.raises(BadAdversaryError):
            com2_simulate(100, Fraction(1, 2), 1, lambda s: 1)

    def test_min_deletion_exact(self):
        # ceil(1 * 16^(1/2)) = 4, ceil(16^(3/4)) = 8
        assert min_deletion(16, Fraction(1, 2), 1) == 4
        assert min_deletion(16, Fraction(1, 4), 1) == 8
        assert min_deletion(10, Fraction(1, 2), 1) == 4  # ceil(sqrt(10))

    def test_budget_params(self):
        with pytest.raises(BadParamsError):
            com2_budget(10, Fraction(3, 2), 1)


class TestMultDichotomy:
    def test_ap_small_energy(self):
        out = mult_dichotomy(interval(16), 1, 2)
        assert isinstance(out, SmallEnergy)
        assert out.report.holds

    def test_gp_structured(self):
        out = mult_dichotomy(gp(1, 3, 16), Fraction(6, 5), 2)
        assert isinstance(out, StructuredSubset)
        assert len(out.B) >= 2
        assert set(out.B) <= set(gp(1, 3, 16))

    def test_singleton_structured(self):
        out = mult_dichotomy(IntSet([7]), 1, 2)
        assert isinstance(out, StructuredSubset)
        assert list(out.B) == [7]

    def test_nonpositive_rejected(self):
        with pytest.raises(BadParamsError):
            mult_dichotomy(IntSet([0, 1]), 1, 2)


class TestDecompose:
    def test_mix_partitions_exactly(self):
        d = decompose(MIX, CFG)
        assert set(d.B) | set(d.C) == set(MIX)
        assert not (set(d.B) & set(d.C))
        assert d.iterations_used <= d.budget

    def test_mix_certificates(self):
        d = decompose(MIX, CFG)
        exp = Fraction(14, 5)  # 2s - k = 2.8
        if len(d.B):
            eb = energy(d.B, 2, ADDITIVE).count
            assert precision.cmp_count_power(eb, len(d.B), exp) <= 0
        mc = energy(d.C, 2, MULTIPLICATIVE).count
        assert precision.cmp_count_power(mc, len(d.C), exp) <= 0

    def test_pure_ap_zero_iterations(self):
        d = decompose(interval(16), CFG)
        assert d.iterations_used == 0
        assert len(d.B) == 0 and d.C == interval(16)
        assert d.stop_report.holds

    def test_pure_gp_extracts(self):
        G = gp(1, 3, 16)
        d = decompose(G, CFG)
        assert d.iterations_used >= 1
        assert len(d.B) >= 14  # nearly all of the GP moves to B
        for D, rep, _ in d.trace:
            assert rep.holds

    def test_mixed_signs(self):
        A = IntSet([-3, -9, -27, 0, 2, 4, 8, 16])
        d = decompose(A, CFG)
        assert set(d.B) | set(d.C) == set(A)
        assert not (set(d.B) & set(d.C))

    def test_dilation_invariance(self):
        G = gp(1, 3, 12)
        G7 = IntSet(7 * g for g in G)
        d1, d2 = decompose(G, CFG), decompose(G7, CFG)
        assert [r.lhs for _, r, _ in d1.trace] == [r.lhs for _, r, _ in d2.trace]
        assert d1.iterations_used == d2.iterations_used

    def test_exhaustive_extractor(self):
        cfg = DecomposeConfig(k=Fraction(6, 5), s=2, q=4, extractor="exhaustive")
        d = decompose(gp(1, 2, 10), cfg)
        assert set(d.B) | set(d.C) == set(gp(1, 2, 10))
        assert d.iterations_used <= d.budget

    def test_empty_rejected(self):
        with pytest.raises(BadParamsError):
            decompose(IntSet([]), CFG)


class TestDecomposeEric:
    ECFG = DecomposeConfig(k=1, s1=2, s2=2, mode="calibrated")

    def test_gp_zero_iterations(self):
        d = decompose_eric(gp(1, 3, 16), self.ECFG)
        assert d.iterations_used == 0 and len(d.B) == 0
        assert d.stop_report.holds

    def test_ap_run(self):
        d = decompose_eric(interval(16), self.ECFG)
        assert set(d.B) | set(d.C) == set(interval(16))
        assert d.stop_report.holds
        for D, rep, _ in d.trace:
            assert rep.holds

    def test_singleton_small_set_guard(self):
        d = decompose_eric(IntSet([5]), self.ECFG)
        assert d.iterations_used == 0 and list(d.C) == [5]

    def test_certified_extractions_multiplicative(self):
        cfg = DecomposeConfig(k=1, s1=2, s2=2, extractor="exhaustive")
        A = IntSet(list(range(1, 13)))
        d = decompose_eric(A, cfg)
        exp = Fraction(3)  # 2*s2 - k
        for D, rep, _ in d.trace:
            if D is not None and rep.holds:
                m = energy(D, 1, MULTIPLICATIVE).count
                assert precision.cmp_count_power(m, len(D), exp) <= 0


def test_random_partition_property():
    rng = random.Random(9)
    for _ in range(10):
        vals = rng.sample(range(1, 400), rng.randint(4, 12))
        A = IntSet(vals)
        d = decompose(A, CFG)
        assert set(d.B) | set(d.C) == set(A)
        assert not (set(d.B) & set(d.C))
        assert d.iterations_used <= d.budget
