"""
Layer Report

Evaluates a spread layer on the central window:
- surface profile z_int and its statistics (t, roughness)
- packing fraction fields Phi_t and Phi_t0 sharing one numerator
- sub-layer packing fractions
"""

import sys
import os
from dataclasses import dataclass, field

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.metrics_config import SUBLAYER_INTERVALS
from metrics.grid_spec import ScalarField2D, field_stats
from metrics.surface_profile import surface_profile_raw, surface_profile_filtered
from metrics.packing_fraction import (
    packing_fraction_field,
    packing_fraction_fields,
    sublayer_packing
)


@dataclass
class LayerReport:
    """Layer quality metrics of one run"""

    mean_packing: float
    std_packing: float
    mean_height: float
    std_height: float
    nominal_thickness: float
    d_max0: float
    mean_packing_t0: float = 0.0
    std_packing_t0: float = 0.0
    mean_raw_height: float = 0.0
    sublayers: list = field(default_factory=list)

    @property
    def relative_height(self):
        """t / t0"""
        return self.mean_height / self.nominal_thickness

    @property
    def relative_roughness(self):
        """std(z_int) / d_max0"""
        return self.std_height / self.d_max0

    def to_row(self):
        """Flat dict, one CSV row"""
        row = {
            'mean_packing': self.mean_packing,
            'std_packing': self.std_packing,
            'mean_packing_t0': self.mean_packing_t0,
            'std_packing_t0': self.std_packing_t0,
            'mean_height': self.mean_height,
            'std_height': self.std_height,
            'relative_height': self.relative_height,
            'relative_roughness': self.relative_roughness,
            'nominal_thickness': self.nominal_thickness,
        }
        for z_low, z_high, phi in self.sublayers:
            row[f"sublayer_{z_low / self.d_max0:g}_{z_high / self.d_max0:g}"] = phi
        return row


def _window_particles(positions, radii, spec):
    """Particles whose footprint touches the window in x"""
    x0, x1, _, _ = spec.window
    x = positions[:, 0]
    keep = (x + radii >= x0) & (x - radii <= x1)
    return positions[keep], radii[keep]


def evaluate_layer(positions, radii, spec, nominal_thickness, d_max0, sublayers=None):
    """
    Compute all layer metrics

    Args:
        positions, radii: particle snapshot
        spec: validated MetricGridSpec
        nominal_thickness: t0 [m]
        d_max0: nominal maximum diameter [m]
        sublayers: (z_low, z_high) pairs in meters, default
                   [0, d0], [d0, 2 d0], [2 d0, 3 d0]
    Returns:
        (LayerReport, fields) where fields maps raw_profile, z_int,
        phi_t and phi_t0 to ScalarField2D
    """
    positions = np.asarray(positions, dtype=float).reshape(-1, 3)
    radii = np.asarray(radii, dtype=float).reshape(-1)
    positions, radii = _window_particles(positions, radii, spec)
    if sublayers is None:
        sublayers = [(a * d_max0, b * d_max0) for a, b in SUBLAYER_INTERVALS]

    raw = surface_profile_raw(positions, radii, spec)
    z_int = surface_profile_filtered(raw, spec)
    mean_height, std_height = field_stats(z_int)
    thickness = mean_height - spec.substrate_height

    # one numerator for both reference heights: all solid in the column
    top = float(np.max(positions[:, 2] + radii)) if len(positions) else spec.substrate_height
    top = max(top, spec.substrate_height + nominal_thickness)
    if thickness > 0:
        phi_t0, phi_t = packing_fraction_fields(positions, radii, spec,
                                                [nominal_thickness, thickness], top)
    else:
        phi_t0 = packing_fraction_field(positions, radii, spec, nominal_thickness, top)
        phi_t = ScalarField2D(phi_t0.origin, phi_t0.pitch, np.zeros_like(phi_t0.values))

    mean_packing, std_packing = field_stats(phi_t)
    mean_packing_t0, std_packing_t0 = field_stats(phi_t0)
    layers = [(z_low, z_high, sublayer_packing(positions, radii, spec, (z_low, z_high)))
              for z_low, z_high in sublayers]

    report = LayerReport(
        mean_packing=mean_packing,
        std_packing=std_packing,
        mean_height=thickness,
        std_height=std_height,
        nominal_thickness=nominal_thickness,
        d_max0=d_max0,
        mean_packing_t0=mean_packing_t0,
        std_packing_t0=std_packing_t0,
        mean_raw_height=float(np.mean(raw.values)) - spec.substrate_height,
        sublayers=layers
    )
    fields = {'raw_profile': raw, 'z_int': z_int, 'phi_t': phi_t, 'phi_t0': phi_t0}
    return report, fields
