from fractions import Fraction

import mpmath
import pytest

from energia.constants import (
    ExponentExpr,
    bta_eta,
    eric_params,
    gemn_params,
    rtp_constants,
    rtp_exponent_bound,
    thrt_trace,
)
from energia.errors import BadParamsError


class TestExponentExpr:
    def test_literal_arithmetic(self):
        e = (ExponentExpr.lit(3) + 4) * 2
        assert e.exact() == 14

    def test_ceil(self):
        assert (ExponentExpr.lit(Fraction(7, 2))).ceil().exact() == 4
        assert (ExponentExpr.lit(-Fraction(7, 2))).ceil().exact() == -3

    def test_log2_power_of_two(self):
        assert ExponentExpr.lit(64).log2().exact() == 6
        assert ExponentExpr.lit(Fraction(1, 8)).log2().exact() == -3
        assert ExponentExpr.lit(3).log2().exact() is None

    def test_pow2_cap(self):
        big = ExponentExpr.pow2(ExponentExpr.lit(2**21))
        assert big.exact() is None
        assert big.log2_value() == 2**21

    def test_value_of_irrational_log(self):
        v = ExponentExpr.lit(3).log2().value()
        with mpmath.workprec(300):
            assert abs(v - mpmath.log(3, 2)) < mpmath.mpf(2) ** -200


class TestGemnParams:
    def test_k1_q2(self):
        g = gemn_params(1, 2)
        assert g["Lambda"].exact() == 31
        assert g["l"].exact() == 37200

    def test_k1_q4(self):
        g = gemn_params(1, 4)
        assert g["Lambda"].exact() == 56
        assert g["l"].exact() == 600 * 4 * 56

    def test_tower_representable(self):
        g = gemn_params(1, 2)
        # s = 2^(5 + (1 + 120*2^37200) * 1): only its log2 is materializable
        log2_s = g["log2_s"]
        assert log2_s.exact() is None
        assert log2_s.log2_value() > 37200

    def test_validation(self):
        with pytest.raises(BadParamsError):
            gemn_params(Fraction(1, 2), 2)
        with pytest.raises(BadParamsError):
            gemn_params(1, 3)


class TestEricParams:
    def test_b30_m2(self):
        e = eric_params(30, 2)
        assert e["k"] == 1
        assert e["log2_s2"].exact() == 246

    def test_k_formula(self):
        assert eric_params(60, 1)["k"] == 2

    def test_validation(self):
        with pytest.raises(BadParamsError):
            eric_params(29, 1)


class TestRtp:
    def test_T2(self):
        assert rtp_constants(2)["T_k"] == 2412

    def test_T3(self):
        assert rtp_constants(3)["T_k"] == 4988

    def test_eta2_to_50_bits(self):
        eta = rtp_constants(2)["eta_k"]
        with mpmath.workprec(120):
            exact = mpmath.log(mpmath.mpf(2413) / 2412, 2)
            assert abs(eta - exact) < mpmath.mpf(2) ** -50

    def test_exponent_bound_monotone_in_s(self):
        b8 = rtp_exponent_bound(2, 8)
        b16 = rtp_exponent_bound(2, 16)
        # 2s - k dominates; the correction shrinks
        assert b16 - b8 > 15.9


class TestThrt:
    def test_growth_ratio_exact(self):
        t = thrt_trace(2, Fraction(1, 2), 8)
        assert t.growth == Fraction(2413, 2412)

    def test_values_are_exact_geometric(self):
        t = thrt_trace(2, Fraction(1, 2), 32)
        for i in range(1, len(t.values)):
            assert t.values[i] == t.values[i - 1] * t.growth

    def test_crossing_detected(self):
        t = thrt_trace(2, Fraction(3, 2), 8)
        assert t.crossing_index == 0  # already >= k - 1 = 1

    def test_power_of_two_required(self):
        with pytest.raises(BadParamsError):
            thrt_trace(2, Fraction(1, 2), 12)


class TestBta:
    def test_fixed_point_k4(self):
        target = gemn_params(4, 40)["log2_s"]
        assert bta_eta(target)["k"] == 4

    def test_recovers_k5(self):
        target = gemn_params(5, 50)["log2_s"]
        assert bta_eta(target)["k"] == 5

    def test_too_small(self):
        with pytest.raises(BadParamsError):
            bta_eta(10)

    def test_certificate_chain(self):
        cert = bta_eta(gemn_params(4, 40)["log2_s"])["certificate"]
        assert cert["q"] == 40
