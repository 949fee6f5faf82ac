#!/usr/bin/env python3
"""
Unit tests for intdist module
"""

import unittest
from fractions import Fraction

from blockdelta.errors import InvariantViolation
from blockdelta.intdist import IntDist


class TestIntDist(unittest.TestCase):
    """Test cases for IntDist"""

    def setUp(self):
        """Set up test fixtures"""
        self.dist = IntDist({1: Fraction(1, 4), -1: Fraction(1, 4), 0: Fraction(1, 2), 5: 0}, w="01", t=1)

    def test_cleaned_and_sorted(self):
        """Test that zero entries are dropped and keys sorted"""
        self.assertEqual(list(self.dist.support), [-1, 0, 1])
        self.assertTrue(self.dist.is_exact)

    def test_negative_probability_rejected(self):
        """Test that negative masses raise"""
        with self.assertRaises(InvariantViolation):
            IntDist({0: Fraction(-1, 2)})
        with self.assertRaises(InvariantViolation):
            IntDist({0: Fraction(1)}, Fraction(-1, 8))

    def test_moments(self):
        """Test mass, mean, second moment and lookup"""
        self.assertEqual(self.dist.mass(), 1)
        self.assertEqual(self.dist.mean(), 0)
        self.assertEqual(self.dist.moment(2), Fraction(1, 2))
        self.assertEqual(self.dist[7], 0)
        self.assertEqual(self.dist.upper_sum(0), Fraction(3, 4))

    def test_point_mass(self):
        """Test the point mass constructor"""
        self.assertEqual(IntDist.point_mass(3).support, {3: Fraction(1)})

    def test_average(self):
        """Test the uniform mixture"""
        mixed = IntDist.average([IntDist.point_mass(0), IntDist({1: Fraction(1, 2)}, Fraction(1, 2))])
        self.assertEqual(mixed.support, {0: Fraction(1, 2), 1: Fraction(1, 4)})
        self.assertEqual(mixed.tail_bound, Fraction(1, 4))

    def test_reflected_and_restricted(self):
        """Test k -> -k and truncation into the tail bound"""
        skewed = IntDist({0: Fraction(1, 2), 2: Fraction(1, 4), -3: Fraction(1, 4)})
        self.assertEqual(skewed.reflected().support, {-2: Fraction(1, 4), 0: Fraction(1, 2), 3: Fraction(1, 4)})
        cut = skewed.restricted(2)
        self.assertEqual(cut.support, {0: Fraction(1, 2), 2: Fraction(1, 4)})
        self.assertEqual(cut.tail_bound, Fraction(1, 4))
        self.assertFalse(cut.is_exact)

    def test_from_counts(self):
        """Test densities built from integer counts"""
        dist = IntDist.from_counts({0: 6, 1: 1}, 8)
        self.assertEqual(dist[0], Fraction(3, 4))
        self.assertEqual(dist.tail_bound, Fraction(1, 8))

    def test_same_values_ignores_labels(self):
        """Test comparison of values only"""
        other = IntDist(dict(self.dist.support), w="10", t=1)
        self.assertTrue(self.dist.same_values(other))

    def test_to_dict(self):
        """Test the JSON shape"""
        self.assertEqual(
            self.dist.to_dict(),
            {"w": "01", "t": 1, "support": [[-1, "1/4"], [0, "1/2"], [1, "1/4"]], "tail_bound": "0/1"},
        )
