#!/usr/bin/env python3
"""
Unit tests for cfengine module
"""

import logging
import unittest
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from blockdelta import cfengine
from blockdelta.cfengine import (
    DEFAULT_LENGTH_CAP,
    build_A,
    build_B,
    build_C,
    dist,
    dist_conditional,
    eval_cf,
    gamma,
    gamma1,
    gamma_vec,
)
from blockdelta.direct import empirical_dist
from blockdelta.errors import ResourceLimitError
from blockdelta.words import Pattern, all_patterns

HALF = Fraction(1, 2)


def non_constant(max_length):
    return [w for length in range(2, max_length + 1) for w in all_patterns(length) if not w.is_constant]


class TestMatrices(unittest.TestCase):
    """Test cases for the monomial matrices A_t, B_t, C_t"""

    def setUp(self):
        """Set up test fixtures"""
        self.w = Pattern.parse("011")

    def test_a0_has_no_shift(self):
        """Test that every entry of A_0 is 1/2"""
        A = build_A(self.w, 0)
        for j in range(4):
            self.assertEqual(A.entry(j, j >> 1), (HALF, 0))
            self.assertEqual(A.entry(j, (j >> 1) + 2), (HALF, 0))

    def test_a1_entries(self):
        """Test the exponents of A_1 for w = 011"""
        A = build_A(self.w, 1)
        self.assertEqual(A.entry(2, 1), (HALF, 1))
        self.assertEqual(A.entry(3, 1), (HALF, -1))
        self.assertEqual(A.entry(3, 3), (HALF, 0))
        self.assertEqual(A.entry(0, 0), (HALF, 0))
        self.assertIsNone(A.entry(0, 1))

    def test_periodic_in_t(self):
        """Test that A_t depends on t mod 2^l only"""
        for t in range(8):
            self.assertEqual(build_A(self.w, t), build_A(self.w, t + 8))
            self.assertEqual(build_A(self.w, t), build_A(self.w, t + 64))

    def test_row_masks_add_up(self):
        """Test B_t + C_t = A_t"""
        for t in range(8):
            self.assertEqual(build_B(self.w, t) + build_C(self.w, t), build_A(self.w, t))

    def test_stochastic_at_one(self):
        """Test that every row of A_t sums to 1 at z = 1"""
        for t in range(8):
            self.assertEqual(build_A(self.w, t).row_moments(0), [Fraction(1)] * 4)

    def test_overlapping_rows_rejected(self):
        """Test that A_t + A_t is refused"""
        with self.assertRaises(ValueError):
            build_A(self.w, 1) + build_A(self.w, 1)


@pytest.mark.parametrize("w", [str(w) for length in (2, 3, 4) for w in all_patterns(length)])
def test_gamma1_is_probability_vector(w):
    """Test Gamma_1 at z = 1 and the polynomial/rational split"""
    w = Pattern.parse(w)
    vector = gamma1(w)
    assert vector.at_one() == [Fraction(1)] * len(vector)
    if not w.is_constant:
        assert all(entry.d == 0 for entry in vector.entries)
    else:
        assert any(entry.d == 1 for entry in vector.entries)


def test_gamma1_ones_entry():
    """Test gamma_{1,1} for w = 11: d_1(n) for odd n is 1 - r + p"""
    entry = gamma1(Pattern.parse("11"))[1]
    coeffs, _ = entry.coefficients(Fraction(1, 2 ** 20), kmax=3)
    # r >= 1 trailing ones with probability 2^-r, the digit above the run is 1 w.p. 1/2
    assert coeffs[1] == Fraction(1, 4)
    assert coeffs[0] == Fraction(1, 4) + Fraction(1, 8)
    assert coeffs[-1] == Fraction(1, 8) + Fraction(1, 16)


@pytest.mark.parametrize("w", ["01", "011", "0110", "11", "000"])
def test_doubling_identity(w):
    """Test Gamma_{2t} = A_{2t} Gamma_t"""
    w = Pattern.parse(w)
    for t in range(1, 24):
        assert gamma_vec(w, 2 * t) == build_A(w, 2 * t).apply(gamma_vec(w, t)).normalized()


@pytest.mark.parametrize("w", ["01", "011", "0110", "111"])
def test_equal_entries_after_many_blocks(w):
    """Test that Gamma_t has identical entries when t = m * 2^(2l-2)"""
    w = Pattern.parse(w)
    for m in (1, 2, 3):
        assert cfengine.all_entries_equal(gamma_vec(w, m << (2 * w.length - 2)))


@pytest.mark.parametrize("w", [str(w) for length in (2, 3, 4) for w in all_patterns(length)])
def test_snake_product_rows(w):
    """Test that only row [b_{l-2} ... b_0] of the product survives, for l - 1 <= h <= 6"""
    w = Pattern.parse(w)
    size = 1 << (w.length - 1)
    for h in range(w.length - 1, 7):
        for bits in product((0, 1), repeat=h):
            matrix = cfengine.snake_product(w, bits)
            row = sum(bits[i] << i for i in range(w.length - 1))
            for j in range(size):
                expected = Fraction(1, 2 ** h) if j == row else Fraction(0)
                assert matrix[j] == [expected] * size


@pytest.mark.parametrize("w", [str(w) for length in (2, 3, 4) for w in all_patterns(length)])
def test_matrix_power_is_uniform(w):
    """Test A_0^h at z = 1 has every entry 2^-(l-1) for l - 1 <= h <= 6"""
    w = Pattern.parse(w)
    size = 1 << (w.length - 1)
    for h in range(w.length - 1, 7):
        power = cfengine.matrix_power_at_one(w, h)
        assert all(entry == Fraction(1, size) for row in power for entry in row)


class TestDist(unittest.TestCase):
    """Test cases for dist and dist_conditional"""

    def test_zero_shift(self):
        """Test delta_0 = point mass at 0"""
        self.assertEqual(dist(Pattern.parse("11"), 0).support, {0: Fraction(1)})
        self.assertEqual(dist(Pattern.parse("011"), 0).support, {0: Fraction(1)})

    def test_blocks_pattern_t1(self):
        """Test delta_1 for w = 01"""
        self.assertEqual(
            dist(Pattern.parse("01"), 1).support,
            {-1: Fraction(1, 4), 0: Fraction(1, 2), 1: Fraction(1, 4)},
        )

    def test_ones_pattern_t1(self):
        """Test delta_1 for w = 11 and the certified tail"""
        delta = dist(Pattern.parse("11"), 1, Fraction(1, 10 ** 6), kmax=2)
        self.assertEqual(delta[1], Fraction(3, 8))
        self.assertEqual(delta[0], Fraction(7, 16))
        self.assertEqual(delta[-1], Fraction(3, 32))
        self.assertEqual(delta[-2], Fraction(3, 64))
        self.assertFalse(delta.is_exact)
        self.assertLessEqual(delta.tail_bound, Fraction(1, 10 ** 6))
        self.assertEqual(delta.mass() + delta.tail_bound, 1)

    def test_non_constant_is_exact(self):
        """Test that non-constant patterns need no tolerance"""
        delta = dist(Pattern.parse("0110"), 1234)
        self.assertTrue(delta.is_exact)
        self.assertEqual(delta.mass(), 1)

    def test_bad_arguments(self):
        """Test residue, epsilon and shift checks"""
        w = Pattern.parse("011")
        with self.assertRaises(ValueError):
            dist_conditional(w, 3, 4)
        with self.assertRaises(ValueError):
            dist(Pattern.parse("11"), 3, Fraction(0))
        with self.assertRaises(ValueError):
            dist(w, -1)


@pytest.mark.parametrize("w", [str(w) for w in non_constant(3)])
def test_dist_matches_oracle(w):
    """Test dist against exhaustive enumeration for t < 32"""
    w = Pattern.parse(w)
    for t in range(32):
        assert dist(w, t).same_values(empirical_dist(w, t).to_int_dist())


@pytest.mark.slow
def test_dist_matches_oracle_sweep():
    """Test dist against enumeration for every non-constant pattern up to length 4 and t < 256"""
    for w in non_constant(4):
        for t in range(256):
            assert dist(w, t).same_values(empirical_dist(w, t).to_int_dist())


@pytest.mark.parametrize("w", ["00", "11", "111"])
def test_constant_dist_matches_oracle(w):
    """Test constant patterns on |k| <= 4 against enumeration"""
    w = Pattern.parse(w)
    for t in range(16):
        expected = empirical_dist(w, t, kmax=4).to_int_dist()
        assert dist(w, t, kmax=4).restricted(4).support == expected.support


@pytest.mark.slow
@pytest.mark.parametrize("w", ["00", "11", "000", "111", "0000", "1111"])
def test_constant_dist_matches_oracle_sweep(w):
    """Test constant patterns on |k| <= 10 against enumeration for t < 256"""
    w = Pattern.parse(w)
    for t in range(256):
        expected = empirical_dist(w, t, kmax=10).to_int_dist()
        assert dist(w, t, kmax=10).restricted(10).support == expected.support, t


@pytest.mark.parametrize("w", ["011", "0110", "10"])
def test_conditional_densities_match_oracle(w):
    """Test delta_{t,j} against the residue class counts"""
    w = Pattern.parse(w)
    for t in range(16):
        oracle = empirical_dist(w, t)
        for j in range(1 << (w.length - 1)):
            delta = dist_conditional(w, t, j)
            for k in set(delta.support) | set(oracle.residue_counts.get(j, {})):
                assert delta[k] == oracle.conditional_density(j, k)


class TestEvalCF(unittest.TestCase):
    """Test cases for eval_cf"""

    def setUp(self):
        """Set up test fixtures"""
        self.theta = np.linspace(-np.pi, np.pi, 257)

    def test_value_at_zero(self):
        """Test gamma_t(0) = 1"""
        self.assertAlmostEqual(abs(eval_cf(Pattern.parse("11"), 9, 0.0)), 1.0, places=12)

    def test_matches_distribution(self):
        """Test the closed form against sum_k delta_t(k) e(ikθ)"""
        w = Pattern.parse("011")
        delta = dist(w, 37)
        series = sum(float(p) * np.exp(1j * k * self.theta) for k, p in delta.support.items())
        np.testing.assert_allclose(eval_cf(w, 37, self.theta), series, atol=1e-12)

    def test_constant_within_tail(self):
        """Test the rational form of a constant pattern against its truncated series"""
        w = Pattern.parse("11")
        delta = dist(w, 5, Fraction(1, 2 ** 50))
        series = sum(float(p) * np.exp(1j * k * self.theta) for k, p in delta.support.items())
        error = np.max(np.abs(eval_cf(w, 5, self.theta) - series))
        self.assertLessEqual(error, float(delta.tail_bound) + 1e-12)

    def test_bounded_by_one(self):
        """Test |gamma_t| <= 1 on the circle"""
        values = eval_cf(Pattern.parse("0110"), 1000, self.theta)
        self.assertLessEqual(float(np.max(np.abs(values))), 1.0 + 1e-12)


@pytest.mark.parametrize("w", [str(w) for length in (2, 3) for w in all_patterns(length)])
def test_negation_reflects_distribution(w):
    """Test gamma for the negated pattern is gamma(1/z)"""
    w = Pattern.parse(w)
    for t in range(32):
        assert cfengine.symmetry_holds(w, t)


@pytest.mark.slow
@pytest.mark.parametrize("w", [str(w) for length in (2, 3, 4) for w in all_patterns(length)])
def test_negation_reflects_distribution_sweep(w):
    """Test the reflection identity for every pattern up to length 4 and t < 256"""
    w = Pattern.parse(w)
    for t in range(256):
        assert cfengine.symmetry_holds(w, t), t


def test_negation_reflects_dist_values():
    """Test dist(01, t)(k) = dist(10, t)(-k)"""
    for t in range(64):
        assert dist(Pattern.parse("10"), t).same_values(dist(Pattern.parse("01"), t).reflected())


@pytest.mark.parametrize("w", ["01", "001", "011", "0110"])
def test_refined_symmetry_holds(w):
    """Test the residue-level reflection identity for small shifts"""
    w = Pattern.parse(w)
    for t in range(8):
        assert cfengine.conditional_symmetry_mismatches(w, t) == []


def test_gamma_is_average():
    """Test gamma_t at z = 1 and its mean against the distribution"""
    w = Pattern.parse("0110")
    for t in range(16):
        assert gamma(w, t).at_one() == 1
        assert gamma(w, t).moment(1) == dist(w, t).mean()


class TestLengthCap(unittest.TestCase):
    """Test cases for the pattern length cap"""

    def tearDown(self):
        """Restore the default cap"""
        cfengine.set_length_cap(DEFAULT_LENGTH_CAP)

    def test_long_pattern_rejected(self):
        """Test that length 13 exceeds the default cap"""
        with self.assertRaises(ResourceLimitError):
            gamma_vec(Pattern.parse("0" * 12 + "1"), 1)

    def test_invalid_cap(self):
        """Test that caps below 2 are refused"""
        with self.assertRaises(ValueError):
            cfengine.set_length_cap(1)

    def test_lowered_cap(self):
        """Test that a lowered cap applies to every builder"""
        cfengine.set_length_cap(2)
        with self.assertRaises(ResourceLimitError):
            build_A(Pattern.parse("011"), 0)


def test_raised_cap_warns(caplog):
    """Test the memory warning when the cap is raised"""
    try:
        with caplog.at_level(logging.WARNING, logger="blockdelta.cfengine"):
            cfengine.set_length_cap(DEFAULT_LENGTH_CAP + 2)
        assert "cap raised to 14" in caplog.text
    finally:
        cfengine.set_length_cap(DEFAULT_LENGTH_CAP)


def test_clear_caches():
    """Test that cached descents are dropped"""
    w = Pattern.parse("0101")
    gamma_vec(w, 5)
    assert w in cfengine.memo_tables()
    cfengine.clear_caches()
    assert w not in cfengine.memo_tables()
