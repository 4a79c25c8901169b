"""
Particle Size Distribution

Truncated log-normal diameter law fitted to D10 / D50 / D90 and
inverse-CDF sampling into [d_min, d_max].
"""

import sys
import os
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import lognorm, norm

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.process_config import D10, D50, D90, NOMINAL_MAX_DIAMETER
from dem.errors import InvalidParameterError


@dataclass
class SizeDistribution:
    """Truncated log-normal diameters"""

    mu_ln: float
    sigma_ln: float
    d_min: float
    d_max: float
    d10: float = D10
    d50: float = D50
    d90: float = D90
    d_max0: float = NOMINAL_MAX_DIAMETER

    def __post_init__(self):
        if not self.sigma_ln > 0:
            raise InvalidParameterError(f"sigma_ln must be > 0, got {self.sigma_ln}")
        if not 0 < self.d_min < self.d_max:
            raise InvalidParameterError(
                f"truncation bounds must satisfy 0 < d_min < d_max, got {self.d_min}, {self.d_max}")

    @property
    def mean_diameter(self):
        """Nominal mean diameter d0 (the D50 of the fit)"""
        return math.exp(self.mu_ln)

    @property
    def law(self):
        """Untruncated frozen scipy log-normal"""
        return lognorm(s=self.sigma_ln, scale=math.exp(self.mu_ln))

    def truncation_mass(self):
        """(cdf(d_min), cdf(d_max)) of the untruncated law"""
        low, high = self.law.cdf([self.d_min, self.d_max])
        return float(low), float(high)

    def truncated_quantile(self, q):
        """Quantile of the truncated law"""
        low, high = self.truncation_mass()
        return float(self.law.ppf(low + q * (high - low)))


def fit_lognormal(d10, d50, d90, d_max0=NOMINAL_MAX_DIAMETER):
    """
    Fit a log-normal law to three percentiles

    mu_ln = ln(D50); sigma_ln is the least-squares value for the two
    one-sided conditions ln(D50/D10) = ln(D90/D50) = sigma_ln z90, i.e.
    their mean. Truncation is [D10, D90].
    """
    if not 0 < d10 < d50 < d90:
        raise InvalidParameterError(
            f"percentiles must satisfy 0 < D10 < D50 < D90, got {d10}, {d50}, {d90}")
    z90 = norm.ppf(0.9)
    sigma = (math.log(d50 / d10) + math.log(d90 / d50)) / (2.0 * z90)
    return SizeDistribution(math.log(d50), sigma, d10, d90, d10, d50, d90, d_max0)


def from_log_parameters(mu_ln, sigma_ln, d_min, d_max, d_max0=NOMINAL_MAX_DIAMETER):
    """Distribution given directly by (mu_ln, sigma_ln) and bounds"""
    if not sigma_ln > 0:
        raise InvalidParameterError(f"sigma_ln must be > 0, got {sigma_ln}")
    d10, d50, d90 = lognorm(s=sigma_ln, scale=math.exp(mu_ln)).ppf([0.1, 0.5, 0.9])
    return SizeDistribution(mu_ln, sigma_ln, d_min, d_max, float(d10), float(d50), float(d90),
                            d_max0)


def sample_diameters(dist, count, seed=0):
    """
    Draw count diameters from the truncated law

    Args:
        dist: SizeDistribution
        count: number of diameters
        seed: int seed or numpy Generator
    Returns:
        numpy array of diameters [m]
    """
    if count <= 0:
        raise InvalidParameterError(f"count must be > 0, got {count}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    low, high = dist.truncation_mass()
    draws = dist.law.ppf(rng.uniform(low, high, int(count)))
    return np.clip(draws, dist.d_min, dist.d_max)


def sample_volume(dist, solid_volume, seed=0):
    """Draw diameters until their summed sphere volume reaches solid_volume"""
    if not solid_volume > 0:
        raise InvalidParameterError(f"solid_volume must be > 0, got {solid_volume}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    mean_volume = math.pi / 6.0 * dist.mean_diameter ** 3
    diameters = sample_diameters(dist, max(1, int(solid_volume / mean_volume)), rng)
    volume = math.pi / 6.0 * np.cumsum(diameters ** 3)
    while volume[-1] < solid_volume:
        extra = sample_diameters(dist, max(1, int((solid_volume - volume[-1]) / mean_volume) + 1), rng)
        diameters = np.concatenate([diameters, extra])
        volume = math.pi / 6.0 * np.cumsum(diameters ** 3)
    return diameters[:int(np.searchsorted(volume, solid_volume)) + 1]
