"""
Lattice Seeding

Places particles on a Cartesian lattice inside a box, filled bottom-up,
with a small random jitter to break symmetry.
"""

import sys
import os

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.process_config import LATTICE_CLEARANCE_FACTOR, JITTER_FRACTION
from dem.errors import CapacityError, InvalidParameterError
from dem.particles import ParticleState


def lattice_shape(region_lower, region_upper, pitch):
    """Number of lattice sites per axis"""
    span = np.asarray(region_upper, dtype=float) - np.asarray(region_lower, dtype=float)
    return np.floor(span / pitch + 1e-9).astype(np.int64)


def seed_lattice(diameters, region_lower, region_upper, material, jitter_seed=0, pitch=None):
    """
    Non-overlapping placement of particles

    Args:
        diameters: particle diameters [m]
        region_lower, region_upper: seeding box corners [m]
        material: MaterialTable (for masses)
        jitter_seed: seed of the jitter stream (independent of diameters)
        pitch: lattice spacing, default d_max * (1 + clearance)
    Returns:
        ParticleState with zero velocities
    Raises:
        CapacityError if the box holds fewer sites than particles
    """
    diameters = np.asarray(diameters, dtype=float)
    lower = np.asarray(region_lower, dtype=float)
    upper = np.asarray(region_upper, dtype=float)
    count = len(diameters)
    if count == 0:
        return ParticleState(np.empty((0, 3)), np.empty(0), material)
    d_max = float(diameters.max())
    if pitch is None:
        pitch = d_max * (1.0 + LATTICE_CLEARANCE_FACTOR)
    if pitch < d_max:
        raise InvalidParameterError(f"lattice pitch {pitch} is smaller than d_max {d_max}")

    if count == 1:
        if np.any(upper - lower < d_max):
            raise CapacityError(count, 0)
        return ParticleState([(lower + upper) / 2.0], diameters / 2.0, material)

    shape = lattice_shape(lower, upper, pitch)
    capacity = int(np.prod(shape))
    if count > capacity:
        raise CapacityError(count, capacity)

    # z-major order fills the bottom layers first
    index = np.arange(count)
    per_layer = shape[0] * shape[1]
    iz = index // per_layer
    iy = (index % per_layer) // shape[0]
    ix = index % shape[0]
    sites = lower + (np.stack([ix, iy, iz], axis=1) + 0.5) * pitch

    jitter = min(JITTER_FRACTION * pitch, 0.45 * (pitch - d_max))
    if jitter > 0:
        rng = np.random.default_rng(jitter_seed)
        sites = sites + rng.uniform(-jitter, jitter, size=sites.shape)
    return ParticleState(sites, diameters / 2.0, material)


def max_lattice_count(region_lower, region_upper, d_max):
    """Largest count seed_lattice accepts for a box and d_max"""
    pitch = d_max * (1.0 + LATTICE_CLEARANCE_FACTOR)
    return int(np.prod(lattice_shape(region_lower, region_upper, pitch)))
