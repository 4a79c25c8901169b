"""
Unit Tests for the Particle Size Distribution

Tests the log-normal fit and truncated sampling
"""

import sys
import os
import math
import unittest

import numpy as np
from scipy.stats import norm

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from dem.errors import InvalidParameterError
from powder.size_distribution import (
    fit_lognormal,
    from_log_parameters,
    sample_diameters,
    sample_volume
)


class TestLognormalFit(unittest.TestCase):
    """Test fitting to D10 / D50 / D90"""

    def setUp(self):
        self.dist = fit_lognormal(20e-6, 34e-6, 44e-6)

    def test_median_and_bounds(self):
        self.assertAlmostEqual(self.dist.mean_diameter, 34e-6, delta=1e-15)
        self.assertEqual((self.dist.d_min, self.dist.d_max), (20e-6, 44e-6))

    def test_spread(self):
        expected = (math.log(34 / 20) + math.log(44 / 34)) / (2 * norm.ppf(0.9))
        self.assertAlmostEqual(self.dist.sigma_ln, expected, places=12)
        self.assertAlmostEqual(self.dist.sigma_ln, 0.308, delta=5e-4)

    def test_truncation_mass(self):
        """The asymmetric percentiles keep about three quarters of the fitted law"""
        low, high = self.dist.truncation_mass()
        sigma = self.dist.sigma_ln
        expected = norm.cdf(math.log(44 / 34) / sigma) - norm.cdf(math.log(20 / 34) / sigma)
        self.assertAlmostEqual(high - low, expected, places=10)
        self.assertAlmostEqual(high - low, 0.757, delta=0.005)

    def test_truncated_median(self):
        """Truncation to [D10, D90] pulls the median down to about 32 um"""
        self.assertAlmostEqual(self.dist.truncated_quantile(0.5) * 1e6, 32.0, delta=0.1)

    def test_rejects_unordered_percentiles(self):
        with self.assertRaises(InvalidParameterError):
            fit_lognormal(34e-6, 20e-6, 44e-6)

    def test_direct_parameters(self):
        dist = from_log_parameters(math.log(30e-6), 0.3, 15e-6, 50e-6)
        self.assertAlmostEqual(dist.d50, 30e-6, delta=1e-15)
        self.assertLess(dist.d10, dist.d50)
        self.assertGreater(dist.d90, dist.d50)

    def test_rejects_empty_truncation(self):
        with self.assertRaises(InvalidParameterError):
            from_log_parameters(math.log(30e-6), 0.3, 50e-6, 15e-6)


class TestSampling(unittest.TestCase):
    """Test truncated sampling"""

    def setUp(self):
        self.dist = fit_lognormal(20e-6, 34e-6, 44e-6)

    def test_within_bounds(self):
        d = sample_diameters(self.dist, 20_000, seed=1)
        self.assertEqual(len(d), 20_000)
        self.assertGreaterEqual(d.min(), 20e-6)
        self.assertLessEqual(d.max(), 44e-6)

    def test_sample_median(self):
        d = sample_diameters(self.dist, 50_000, seed=2)
        self.assertAlmostEqual(float(np.median(d)) / self.dist.truncated_quantile(0.5), 1.0,
                               delta=0.01)

    def test_seed_reproducible(self):
        a = sample_diameters(self.dist, 1000, seed=42)
        b = sample_diameters(self.dist, 1000, seed=np.random.default_rng(42))
        c = sample_diameters(self.dist, 1000, seed=43)
        np.testing.assert_array_equal(a, b)
        self.assertFalse(np.array_equal(a, c))

    def test_volume_target(self):
        target = 1e-11
        d = sample_volume(self.dist, target, seed=3)
        volumes = math.pi / 6 * d ** 3
        self.assertGreaterEqual(volumes.sum(), target)
        self.assertLess(volumes[:-1].sum(), target)

    def test_rejects_bad_count(self):
        with self.assertRaises(InvalidParameterError):
            sample_diameters(self.dist, 0)


if __name__ == "__main__":
    unittest.main()
