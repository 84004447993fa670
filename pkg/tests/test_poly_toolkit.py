"""Tests for the integer polynomial toolkit"""

import math
import random
from fractions import Fraction

import numpy as np
import pytest
import sympy

from src.algebra.poly_toolkit import (
    INF,
    DeltaCondition,
    IntPoly,
    binom_necessary,
    build_delta_prime,
    cubic_discriminant,
    delta_check,
    delta_product,
    discriminant,
    enumerate_delta,
    f_poly,
    h_poly,
    isolate_roots,
    kurtz_sufficient,
    odd_multiplicity_part,
    parse_poly,
    power_poly,
    quartic,
    quartic_window,
    reciprocal,
    render_poly,
    require_member,
    resultant,
    root_logs,
    sturm_count,
    unit_root_check,
)
from src.config import settings
from src.utils.exceptions import (
    InvalidParams,
    NonMonic,
    NonUnitConstantTerm,
    NotDeltaMember,
    ParseError,
    SignPatternViolation,
    ZeroPolynomial,
)


class TestParsing:
    @pytest.mark.parametrize(
        "text,coeffs",
        [
            ("x^3 - 6x^2 + 7x - 1", (-1, 7, -6, 1)),
            ("x^2-3x+1", (1, -3, 1)),
            ("-x^2 + 1", (1, 0, -1)),
            ("2*x + 3", (3, 2)),
            ("[1, -3, 1]", (1, -3, 1)),
            ("x^2 + x^2", (0, 0, 2)),
        ],
    )
    def test_parse(self, text, coeffs):
        assert parse_poly(text).coeffs == coeffs

    @pytest.mark.parametrize("text,position", [("x^", 2), ("3y", 1), ("x +", 3)])
    def test_parse_errors_carry_position(self, text, position):
        with pytest.raises(ParseError) as info:
            parse_poly(text)
        assert info.value.position == position

    def test_bad_coefficient_array(self):
        with pytest.raises(ParseError):
            parse_poly("[1, 'a']")

    def test_render(self, f67):
        assert render_poly(f67) == "x^3 - 6x^2 + 7x - 1"
        assert render_poly(IntPoly((0,))) == "0"
        assert str(IntPoly((-2, 0, -1))) == "-x^2 - 2"
        assert parse_poly(render_poly(f67)) == f67


class TestIntPoly:
    def test_normalizes_trailing_zeros(self):
        assert IntPoly((1, 2, 0, 0)).degree == 1
        assert IntPoly(()).is_zero()

    def test_arithmetic(self, h3, h4):
        assert (h3 * h4).coeffs == (1, -7, 14, -7, 1)
        assert h3.derivative().coeffs == (-3, 2)
        assert h3(Fraction(1)) == -1

    def test_from_sympy_rejects_fractions(self):
        with pytest.raises(InvalidParams):
            IntPoly.from_sympy(sympy.Poly(sympy.Rational(1, 2) * sympy.Symbol("x") + 1))


class TestSturm:
    def test_counts(self, h3):
        assert sturm_count(h3) == 2
        assert sturm_count(h3, 0, INF) == 2
        assert sturm_count(h3, 1, INF) == 1
        assert sturm_count(IntPoly((1, 0, 1))) == 0

    def test_counts_distinct_roots(self):
        assert sturm_count(IntPoly((1, -2, 1))) == 1

    def test_zero_polynomial(self):
        with pytest.raises(ZeroPolynomial):
            sturm_count(IntPoly(()))

    def test_isolation(self, h3):
        intervals = isolate_roots(h3, precision=1e-6)
        assert len(intervals) == 2
        for lo, hi in intervals:
            assert hi - lo <= Fraction(1e-6)
        root = (3 + math.sqrt(5)) / 2
        assert any(float(lo) <= root <= float(hi) for lo, hi in intervals)

    def test_root_logs_of_reciprocal_pair(self, h3):
        logs = root_logs(h3)
        assert logs[0] == pytest.approx(-logs[1])
        assert logs[1] == pytest.approx(math.log((3 + math.sqrt(5)) / 2))


class TestDelta:
    def test_member(self, h3, f67):
        for p in (h3, f67):
            verdict = delta_check(p)
            assert verdict.member and verdict.in_delta_prime
            assert verdict.failed_condition is None

    def test_member_with_unit_root(self):
        verdict = delta_check(parse_poly("x^3 - 4x^2 + 4x - 1"))
        assert verdict.member
        assert not verdict.in_delta_prime

    @pytest.mark.parametrize(
        "text,condition",
        [
            ("x - 1", DeltaCondition.DEGREE),
            ("2x^2 - 3x + 1", DeltaCondition.NOT_MONIC),
            ("x^2 - 3x - 1", DeltaCondition.CONSTANT_TERM),
            ("x^2 - 2x + 1", DeltaCondition.ROOTS),
            ("x^2 + x + 1", DeltaCondition.ROOTS),
            ("x^2 + 3x + 1", DeltaCondition.ROOTS),
        ],
    )
    def test_failures(self, text, condition):
        verdict = delta_check(parse_poly(text))
        assert not verdict.member
        assert verdict.failed_condition is condition
        assert verdict.to_dict()["failed_condition"] == condition.value

    def test_require_member(self):
        with pytest.raises(NotDeltaMember):
            require_member(h_poly(2))

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7])
    def test_build_delta_prime(self, n):
        p = build_delta_prime(n)
        assert p.degree == n
        assert delta_check(p).in_delta_prime

    def test_build_delta_prime_rejects_small_n(self):
        with pytest.raises(InvalidParams):
            build_delta_prime(1)

    def test_enumerate_degree_two(self):
        assert enumerate_delta(2, bound=10) == [h_poly(m) for m in range(3, 11)]

    def test_enumerate_cubics_match_discriminant(self):
        members = enumerate_delta(3, bound=9)
        expected = [f_poly(m, n) for n in range(4, 10) for m in range(4, 10) if cubic_discriminant(m, n) > 0]
        assert sorted(members, key=lambda p: p.coeffs) == sorted(expected, key=lambda p: p.coeffs)

    def test_enumerate_in_parallel(self):
        assert enumerate_delta(3, bound=8, jobs=2) == enumerate_delta(3, bound=8)


class TestResultants:
    def test_h3_f67(self, h3, f67):
        assert resultant(h3, f67) == -27 + 117 - 156 + 61

    def test_common_root(self, h3):
        assert resultant(h3, h3 * h_poly(5)) == 0

    def test_constant_factor(self, h3):
        assert resultant(IntPoly((2,)), h3) == 4

    def test_zero(self, h3):
        with pytest.raises(ZeroPolynomial):
            resultant(IntPoly(()), h3)

    @pytest.mark.parametrize("m,n", [(6, 7), (7, 6), (6, 8), (10, 12), (4, 4)])
    def test_cubic_discriminant(self, m, n):
        assert discriminant(f_poly(m, n)) == cubic_discriminant(m, n)

    def test_quadratic_discriminant(self, h3):
        assert discriminant(h3) == 5

    def test_delta_product(self, h3, h4):
        assert delta_product(h3, h4) == parse_poly("x^4 - 7x^3 + 14x^2 - 7x + 1")
        assert delta_product(h3, h3) is None

    def test_vanishes_exactly_on_shared_roots(self):
        rng = random.Random(settings.RANDOM_SEED)
        pool = [h_poly(m) for m in range(3, 8)] + [f_poly(6, 7), f_poly(5, 6), IntPoly((-1, 1))]

        def product(factors):
            result = IntPoly((1,))
            for f in factors:
                result = result * f
            return result

        for _ in range(100):
            p = product(rng.sample(pool, rng.randint(1, 2)))
            q = product(rng.sample(pool, rng.randint(1, 2)))
            roots_p = np.roots(list(reversed(p.coeffs)))
            roots_q = np.roots(list(reversed(q.coeffs)))
            shared = any(abs(a - b) < 1e-6 for a in roots_p for b in roots_q)
            assert (resultant(p, q) == 0) is shared, (str(p), str(q))


class TestPowersAndReciprocals:
    def test_reciprocal(self, f67):
        assert reciprocal(f67) == f_poly(7, 6)
        assert reciprocal(reciprocal(f67)) == f67

    def test_reciprocal_needs_unit_constant(self):
        with pytest.raises(NonUnitConstantTerm):
            reciprocal(IntPoly((2, 1, 1)))

    @pytest.mark.parametrize("k,trace", [(1, 3), (2, 7), (3, 18), (4, 47), (5, 123), (6, 322)])
    def test_powers_of_h3_follow_lucas_numbers(self, h3, k, trace):
        assert power_poly(h3, k) == h_poly(trace)
        assert power_poly(h3, -k) == h_poly(trace)

    def test_power_of_cubic(self, f67):
        squared = power_poly(f67, 2)
        assert squared.degree == 3
        assert delta_check(squared).member
        assert power_poly(f67, -1) == reciprocal(f67)

    def test_membership_is_preserved(self):
        members = enumerate_delta(3, bound=12) + [h_poly(m) for m in range(3, 8)]
        for p in members:
            assert delta_check(reciprocal(p)).member, str(p)
            for k in (-3, -2, -1, 2, 3):
                assert delta_check(power_poly(p, k)).member, (str(p), k)

    def test_power_errors(self, h3):
        with pytest.raises(InvalidParams):
            power_poly(h3, 0)
        with pytest.raises(NonMonic):
            power_poly(IntPoly((1, -3, 2)), 2)


class TestBounds:
    def test_binomial_bound(self, h3):
        assert binom_necessary(h3)
        assert not binom_necessary(h_poly(2))

    def test_sign_pattern(self):
        with pytest.raises(SignPatternViolation):
            binom_necessary(parse_poly("x^2 + 3x + 1"))

    def test_kurtz(self, h3, f67):
        assert kurtz_sufficient(h3)
        assert kurtz_sufficient(f67)
        assert not kurtz_sufficient(h_poly(2))

    def test_kurtz_certifies_quartic_grid(self):
        certified = 0
        for m in range(1, 21):
            for r in range(1, 21):
                for n in range(1, 41):
                    p = quartic(m, n, r)
                    if kurtz_sufficient(p):
                        assert delta_check(p).member, str(p)
                        certified += 1
        assert certified > 0

    def test_members_pass_binomial_bound(self):
        cubics = [f_poly(m, n) for m in range(1, 31) for n in range(1, 31)]
        quartics = [quartic(m, n, r) for m in range(1, 9) for n in range(1, 17) for r in range(1, 9)]
        members = [p for p in cubics + quartics if delta_check(p).member]
        assert {p.degree for p in members} == {3, 4}
        assert all(binom_necessary(p) for p in members)

    def test_quartic_window_gives_member(self):
        assert quartic_window(12, 25, 12)
        p = quartic(12, 25, 12)
        assert kurtz_sufficient(p)
        assert delta_check(p).member


class TestOddMultiplicity:
    def test_odd_part(self):
        p = IntPoly((-1, 1)) * IntPoly((-1, 1)) * IntPoly((-1, 1)) * h_poly(3)
        assert odd_multiplicity_part(p) == IntPoly((-1, 1)) * h_poly(3)

    def test_unit_root_check(self):
        assert unit_root_check(IntPoly((1, 1)))
        assert not unit_root_check(IntPoly((2, 1)))
        assert unit_root_check(IntPoly((1, -1, 1)))
        assert not unit_root_check(IntPoly((2, 0, 1)))
        assert unit_root_check(h_poly(3))
