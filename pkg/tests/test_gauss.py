#!/usr/bin/env python3
"""
Unit tests for gauss module
"""

import math
import unittest
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from blockdelta import gauss
from blockdelta.cfengine import dist
from blockdelta.gauss import (
    Constants,
    budget_for,
    check_lambda_norm,
    check_normal_approximation,
    check_prop_A,
    check_prop_B,
    check_prop_C,
    compare,
    cusick_density,
    error_budget,
    gaussian_main,
    order3_constant,
    order3_remainder,
)
from blockdelta.moments import variance
from blockdelta.words import Pattern, all_patterns, blocks01


def repeated(block, count, suffix=""):
    """The shift whose binary expansion is block^count followed by suffix"""
    return int(block * count + suffix, 2)


class TestGaussianMain(unittest.TestCase):
    """Test cases for gaussian_main"""

    def test_peak(self):
        """Test the value at k = 0"""
        self.assertAlmostEqual(gaussian_main(0, 1), 1 / math.sqrt(2 * math.pi), places=15)

    def test_vectorised(self):
        """Test array input and symmetry in k"""
        values = gaussian_main(np.arange(-5, 6), Fraction(7, 2))
        self.assertEqual(values.shape, (11,))
        np.testing.assert_allclose(values, values[::-1])

    def test_sums_to_one(self):
        """Test that the lattice sum is 1 for a moderate variance"""
        self.assertAlmostEqual(float(np.sum(gaussian_main(np.arange(-200, 201), 10))), 1.0, places=12)

    def test_nonpositive_variance(self):
        """Test that v <= 0 raises"""
        with self.assertRaises(ValueError):
            gaussian_main(0, 0)
        with self.assertRaises(ValueError):
            gaussian_main(1, Fraction(-1, 2))


@pytest.mark.parametrize("k,v", [(0, 1.0), (2, 1.5), (-3, 4.0), (7, 12.25)])
def test_gaussian_main_is_fourier_integral(k, v):
    """Test gaussian_main against (1/2pi) ∫ exp(-v θ²/2) cos(kθ) dθ"""
    limit = 40 / math.sqrt(v)
    value, _ = integrate.quad(
        lambda theta: math.exp(-v * theta * theta / 2) * math.cos(k * theta),
        -limit,
        limit,
        epsabs=1e-14,
        limit=200,
    )
    assert abs(value / (2 * math.pi) - gaussian_main(k, v)) < 1e-12


class TestConstants(unittest.TestCase):
    """Test cases for the explicit constants"""

    def test_length_two(self):
        """Test m, M, L and C for l = 2"""
        constants = Constants.for_length(2)
        self.assertEqual(constants.m, Fraction(1, 4))
        self.assertEqual(constants.M, 12)
        self.assertAlmostEqual(constants.L, math.pi ** 2 / 80)
        self.assertAlmostEqual(constants.L_certified, 1 / (80 * math.pi ** 2))
        self.assertAlmostEqual(constants.C, math.sqrt(40) / math.pi)

    def test_splitting_constant_from_lower_bound(self):
        """Test that C = sqrt(1/m) once 1/m dominates"""
        constants = Constants.for_length(5)
        self.assertEqual(constants.M, Fraction(3 * 7, 8))
        self.assertAlmostEqual(constants.C, 16.0)

    def test_order3_multiples(self):
        """Test K = 4l K2 and K1 = (4l - 1) K2"""
        constants = Constants.for_pattern(Pattern.parse("011"))
        self.assertAlmostEqual(constants.K(0.5), 12 * constants.K2(0.5))
        self.assertAlmostEqual(constants.K1(0.5), 11 * constants.K2(0.5))

    def test_theta0(self):
        """Test the split point and its domain"""
        constants = Constants.for_length(3)
        self.assertAlmostEqual(constants.theta0(100), constants.C * math.sqrt(math.log(100) / 100))
        with self.assertRaises(ValueError):
            constants.theta0(1)
        with self.assertRaises(ValueError):
            Constants.for_length(1)


def test_order3_constant_zero():
    """Test K(0, 0, θ₀) = 0"""
    assert order3_constant(0, 0, 1.0) == 0.0


@pytest.mark.parametrize("a,b", [(3, 19), (1, 0.5), (0, 2), (-2, -1)])
@pytest.mark.parametrize("theta0", [0.1, 0.5, 1.0])
def test_order3_remainder_bound(a, b, theta0):
    """Test the cubic remainder bound on a grid"""
    theta = np.linspace(-theta0, theta0, 401)
    bound = order3_constant(a, b, theta0) * np.abs(theta) ** 3
    assert np.all(order3_remainder(a, b, theta) <= bound * (1 + 1e-9) + 1e-15)


class TestCompare(unittest.TestCase):
    """Test cases for compare"""

    def test_zero_shift_rejected(self):
        """Test that t = 0 raises"""
        with self.assertRaises(ValueError):
            compare(Pattern.parse("11"), 0)

    def test_rows(self):
        """Test the rows for w = 01, t = 1"""
        report = compare(Pattern.parse("01"), 1)
        self.assertEqual([row.k for row in report.rows], [-1, 0, 1])
        self.assertEqual(report.rows[1].delta, Fraction(1, 2))
        self.assertAlmostEqual(report.rows[1].gaussian, 1 / math.sqrt(math.pi))
        self.assertEqual(report.v, Fraction(1, 2))
        self.assertEqual(report.max_error, max(row.abs_error for row in report.rows))

    def test_small_shift_has_no_budget(self):
        """Test that N = 1 gives an infinite bound"""
        report = compare(Pattern.parse("01"), 1)
        self.assertIsNone(report.budget)
        self.assertEqual(report.bound, math.inf)
        self.assertTrue(report.summary()["within_bound"])

    def test_krange(self):
        """Test an explicit k range outside the support"""
        report = compare(Pattern.parse("011"), 5, krange=range(-20, -18))
        self.assertEqual([row.delta for row in report.rows], [0, 0])

    def test_csv_rows_and_summary(self):
        """Test the exported columns"""
        report = compare(Pattern.parse("11"), repeated("10", 8))
        self.assertEqual(list(report.csv_rows()[0]), ["k", "delta_exact", "delta_float", "gaussian", "abs_error"])
        summary = report.summary(with_budget=True)
        self.assertEqual(summary["N"], 8)
        self.assertIn("budget", summary)
        self.assertNotIn("budget", report.summary())
        self.assertLessEqual(report.tail_bound, gauss.COMPARE_TAIL_EPSILON)


@pytest.mark.parametrize("count", [8, 16])
def test_compare_within_bound(count):
    """Test max_k |delta_t(k) - main term| against the error budget"""
    report = compare(Pattern.parse("11"), repeated("10", count))
    assert report.N == count
    assert math.isfinite(report.bound)
    assert report.max_error <= report.bound


@pytest.mark.slow
@pytest.mark.parametrize("pattern", ["11", "011"])
def test_error_decreases_along_block_family(pattern):
    """Test E_N N / log(N)^2 along (10)^N for N = 8, 16, 32, 64"""
    w = Pattern.parse(pattern)
    counts = (8, 16, 32, 64)
    errors = {n: compare(w, repeated("10", n)).max_error for n in counts}
    scaled = {n: errors[n] * n / math.log(n) ** 2 for n in counts}
    for small, large in zip(counts, counts[1:]):
        assert scaled[large] <= 1.5 * scaled[small]
    assert errors[64] < errors[8]


class TestErrorBudget(unittest.TestCase):
    """Test cases for the itemised error budget"""

    def test_terms_add_up(self):
        """Test total and to_dict"""
        budget = budget_for(3, 1000, 200)
        self.assertAlmostEqual(budget.total, budget.gaussian_tail + budget.approximation + budget.cf_tail)
        self.assertEqual(set(budget.to_dict()), {"N", "v", "theta0", "gaussian_tail", "approximation", "cf_tail", "total"})

    def test_decreasing_in_blocks(self):
        """Test the worst-case budget for growing N"""
        m = Constants.for_length(2).m
        totals = [budget_for(2, n, m * n).total for n in (1e12, 1e20, 1e30)]
        self.assertTrue(totals[0] > totals[1] > totals[2])

    def test_decreasing_in_variance(self):
        """Test that a larger variance gives a smaller budget"""
        self.assertGreater(budget_for(2, 1e6, 1e5).total, budget_for(2, 1e6, 1e6).total)

    def test_invalid(self):
        """Test v <= 0, N < 2 and θ₀ > pi"""
        with self.assertRaises(ValueError):
            budget_for(2, 100, 0)
        with self.assertRaises(ValueError):
            budget_for(2, 1, 1)
        with self.assertRaises(ValueError):
            budget_for(5, 2, 1)

    def test_error_budget_uses_variance(self):
        """Test the budget at (w, t) with the exact v_t"""
        w, t = Pattern.parse("011"), repeated("10", 20)
        self.assertEqual(error_budget(w, t).v, float(variance(w, t)))
        self.assertEqual(error_budget(w, t).N, 20)


def test_main_term_dominates_for_huge_n():
    """Test that the main term beats the budget only for astronomically many blocks"""
    w = Pattern.parse("11")
    assert gauss.main_term_dominates(w, 1e40, 0.25)
    assert not gauss.main_term_dominates(w, 100, 0.25)


@pytest.mark.parametrize("w", [str(w) for length in (2, 3) for w in all_patterns(length)])
def test_prop_A_exact(w):
    """Test m N <= v_t <= M N with the exact slack"""
    w = Pattern.parse(w)
    for t in range(256):
        holds, (low, high) = check_prop_A(w, t)
        assert holds
        assert low >= 0 and high >= 0


def test_prop_B_on_grid():
    """Test the cubic approximation bound for w = 11"""
    w = Pattern.parse("11")
    for t in range(1, 64):
        assert check_prop_B(w, t, 1.0, 201).passed


def test_prop_B_rejects_bad_theta0():
    """Test that θ₀ <= 0 raises"""
    with pytest.raises(ValueError):
        check_prop_B(Pattern.parse("11"), 3, 0.0)


class TestDecayChecks(unittest.TestCase):
    """Test cases for the decay checks away from θ = 0"""

    def setUp(self):
        """Set up test fixtures"""
        self.w = Pattern.parse("011")
        self.shifts = [repeated("10", n) for n in (6, 9, 12)] + [repeated("1001", 6, "1")]

    def test_skipped_for_few_blocks(self):
        """Test that N < l + 3 skips the decay checks"""
        check = check_prop_C(self.w, 5)
        self.assertTrue(check.skipped)
        self.assertTrue(check.passed)
        self.assertIn("occ01", check.reason)
        self.assertTrue(check_lambda_norm(self.w, 5).skipped)

    def test_certified_decay(self):
        """Test |gamma_t| <= exp(-L N θ²) with the certified constant"""
        decay = Constants.for_pattern(self.w).L_certified
        for t in self.shifts:
            self.assertTrue(check_prop_C(self.w, t, 801, decay=decay).passed, f"t={t}")

    def test_default_decay_is_certified(self):
        """Test that the default constant holds where the stated one fails"""
        t = repeated("10", 4, "1")
        for w in all_patterns(2):
            certified = Constants.for_pattern(w).L_certified
            default = check_prop_C(w, t)
            self.assertTrue(default.passed, f"w={w}")
            self.assertEqual(default.max_violation, check_prop_C(w, t, decay=certified).max_violation)
            stated = check_prop_C(w, t, decay=Constants.for_pattern(w).L)
            self.assertGreater(stated.max_violation, 0, f"w={w}")

    def test_lambda_norm(self):
        """Test the norm bound on Gamma_t and Gamma_{t+1}"""
        for t in self.shifts:
            check = check_lambda_norm(self.w, t, 801)
            self.assertFalse(check.skipped)
            self.assertTrue(check.passed, f"t={t}")

    def test_normal_approximation(self):
        """Test the entrywise normal approximation"""
        for t in self.shifts:
            self.assertTrue(check_normal_approximation(self.w, t, 1.0, 401).passed)

    def test_to_dict(self):
        """Test the JSON shape of a grid check"""
        payload = check_lambda_norm(self.w, self.shifts[0], 101).to_dict()
        self.assertEqual(payload["check"], "lambda_norm")
        self.assertEqual(payload["w"], "011")
        self.assertEqual(payload["grid_size"], 101)


def test_norm_bound_margin_nonnegative():
    """Test 4 - θ²/pi² >= |1 + e(kθ)| + |1 + e((k+1)θ)| on [-pi, pi]"""
    theta = np.linspace(-math.pi, math.pi, 2001)
    for k in range(0, 40):
        assert np.all(gauss.norm_bound_margin(k, theta) >= -1e-12)


def test_invert_cf_recovers_distribution():
    """Test the trapezoidal inversion of gamma_t"""
    w, t = Pattern.parse("011"), 37
    delta = dist(w, t)
    ks = list(range(min(delta.support) - 2, max(delta.support) + 3))
    values = gauss.invert_cf(w, t, ks)
    np.testing.assert_allclose(values, [float(delta[k]) for k in ks], atol=1e-12)


def test_finite_difference_variance():
    """Test numeric second derivatives of gamma_t at 0 against v_t"""
    w, t = Pattern.parse("011"), 37
    v = float(variance(w, t))
    plain = gauss.finite_difference_variance(w, t, 1e-2)
    extrapolated = gauss.richardson_variance(w, t, 1e-2)
    assert abs(gauss.finite_difference_variance(w, t, 1e-4) - v) < 1e-5
    assert abs(extrapolated - v) < abs(plain - v)
    with pytest.raises(ValueError):
        gauss.finite_difference_variance(w, t, 0)


class TestCusick(unittest.TestCase):
    """Test cases for the density of d_t >= 0"""

    def test_values(self):
        """Test small exact values"""
        self.assertEqual(cusick_density(Pattern.parse("01"), 0), (1, 1))
        self.assertEqual(cusick_density(Pattern.parse("01"), 1), (Fraction(3, 4), Fraction(3, 4)))

    def test_reflection_identity(self):
        """Test c^w_t + c^w̄_t - delta_t(0) = 1"""
        for w in map(Pattern.parse, ("01", "011", "0010")):
            for t in range(64):
                lower, upper = cusick_density(w, t)
                other, _ = cusick_density(w.negate(), t)
                self.assertEqual(lower, upper)
                self.assertEqual(lower + other - dist(w, t)[0], 1)

    def test_constant_interval(self):
        """Test that the interval for constant w has the certified width"""
        epsilon = Fraction(1, 10 ** 9)
        lower, upper = cusick_density(Pattern.parse("11"), 21, epsilon)
        self.assertLessEqual(lower, upper)
        self.assertLessEqual(upper - lower, epsilon)


def test_v1_rough_bound():
    """Test 0 <= u_{1,j} <= v_{1,j} <= 6"""
    for length in (2, 3, 4):
        for w in all_patterns(length):
            holds, largest = gauss.check_v1_rough_bound(w)
            assert holds
            assert largest <= 6


def test_blocks_of_repeated_shift():
    """Test that (10)^N has N blocks"""
    assert [blocks01(repeated("10", n)) for n in range(1, 6)] == [1, 2, 3, 4, 5]
