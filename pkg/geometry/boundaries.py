"""
Periodic Boundary Helpers

The bed is periodic in y; x and z are bounded by rigid walls.
"""

import sys
import os

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from dem.errors import InvalidParameterError


def wrap_y(position, L_y):
    """
    Map the y coordinate into [0, L_y)

    Args:
        position: single position (3,) or array (n, 3)
        L_y: period [m]
    Returns:
        new array with wrapped y, x and z unchanged
    """
    if not L_y > 0:
        raise InvalidParameterError(f"L_y must be > 0, got {L_y}")
    wrapped = np.array(position, dtype=float)
    y = np.mod(wrapped[..., 1], L_y)
    # mod of a tiny negative number rounds up to L_y
    wrapped[..., 1] = np.where(y >= L_y, 0.0, y)
    return wrapped


def minimum_image(delta_y, L_y):
    """Shortest periodic representative of a y separation"""
    return delta_y - L_y * np.round(np.asarray(delta_y, dtype=float) / L_y)


def periodic_separation(position_a, position_b, L_y):
    """Separation vector a - b with the minimum image in y"""
    delta = np.asarray(position_a, dtype=float) - np.asarray(position_b, dtype=float)
    delta[..., 1] = minimum_image(delta[..., 1], L_y)
    return delta


def periodic_distance(position_a, position_b, L_y):
    delta = periodic_separation(position_a, position_b, L_y)
    return np.sqrt(np.sum(delta * delta, axis=-1))


def with_periodic_images(positions, radii, L_y):
    """
    Append y-shifted copies of particles that reach across y = 0 or y = L_y

    Used by the metric kernels so spheres cut by the periodic boundary are
    counted on both sides.
    """
    positions = np.asarray(positions, dtype=float).reshape(-1, 3)
    radii = np.asarray(radii, dtype=float).reshape(-1)
    if L_y is None or len(positions) == 0:
        return positions, radii
    y = positions[:, 1]
    low = y - radii < 0.0
    high = y + radii > L_y
    shifted_up = positions[low].copy()
    shifted_up[:, 1] += L_y
    shifted_down = positions[high].copy()
    shifted_down[:, 1] -= L_y
    return (np.concatenate([positions, shifted_up, shifted_down]),
            np.concatenate([radii, radii[low], radii[high]]))
