"""
Adhesion-to-Gravity Force Ratio

F_gamma / F_G for two touching particles of diameter d: the pull-off
force 4 pi gamma (d/4) over the weight rho g pi d^3 / 6 of one particle.
"""

import sys
import os
import math

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.material_config import GAMMA_0, PARTICLE_DENSITY, GRAVITY
from config.metrics_config import REFERENCE_FORCE_RATIOS, FORCE_RATIO_TOLERANCE
from dem.contact_laws import pull_off_force
from dem.errors import InvalidParameterError


def force_ratio(gamma, diameter, rho=PARTICLE_DENSITY, gravity=GRAVITY):
    """
    Dimensionless adhesion-to-weight ratio

    Args:
        gamma: pair surface energy [J/m^2]
        diameter: particle diameter [m]
        rho: density [kg/m^3]
        gravity: |g| [m/s^2]
    Returns:
        F_gamma / F_G
    """
    if not diameter > 0:
        raise InvalidParameterError(f"diameter must be > 0, got {diameter}")
    if gamma < 0 or rho < 0 or gravity < 0:
        raise InvalidParameterError("gamma, rho and gravity must be >= 0")
    weight = rho * gravity * math.pi * diameter * diameter * diameter / 6.0
    if weight == 0:
        raise InvalidParameterError("particle weight is zero")
    return float(pull_off_force(gamma, diameter / 4.0)) / weight


def equivalent_diameter(gamma, mean_diameter, gamma_0=GAMMA_0):
    """Diameter that gives the same ratio at gamma_0: d * sqrt(gamma_0 / gamma)"""
    if not gamma > 0:
        return math.inf
    return mean_diameter * math.sqrt(gamma_0 / gamma)


def force_ratio_table(mean_diameter, gamma_ratios=None, gamma_0=GAMMA_0,
                      rho=PARTICLE_DENSITY, gravity=GRAVITY):
    """
    Rows of the adhesion-to-gravity table

    Returns:
        list of dicts with gamma_ratio, force_ratio, reference, within_tolerance,
        equivalent_diameter
    """
    ratios = list(REFERENCE_FORCE_RATIOS) if gamma_ratios is None else list(gamma_ratios)
    rows = []
    for ratio in ratios:
        value = force_ratio(ratio * gamma_0, mean_diameter, rho, gravity)
        reference = REFERENCE_FORCE_RATIOS.get(float(ratio))
        if reference is None:
            within = None
        elif reference == 0:
            within = value == 0
        else:
            within = abs(value - reference) <= FORCE_RATIO_TOLERANCE * reference
        rows.append({
            'gamma_ratio': float(ratio),
            'force_ratio': value,
            'reference': reference,
            'within_tolerance': within,
            'equivalent_diameter': equivalent_diameter(ratio * gamma_0, mean_diameter, gamma_0),
        })
    return rows
