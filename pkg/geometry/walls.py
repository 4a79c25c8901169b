"""
Rigid Wall Primitives

Analytic walls used instead of meshed surfaces:
- HalfSpace: infinite plane, particles on the normal side
- AxisAlignedBox: x-z rectangle extruded along the periodic y axis,
  optionally moving (blade, reservoir platform)

Every wall reports signed gaps (negative = overlap), unit normals pointing
from the wall into the particle, the wall surface velocity and its
interaction class.
"""

import sys
import os

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from dem.errors import InvalidParameterError

WALL_CLASSES = ('blade', 'wall')


class HalfSpace:
    """Plane through point with unit normal"""

    def __init__(self, point, normal, interaction_class='wall', name='plane'):
        if interaction_class not in WALL_CLASSES:
            raise InvalidParameterError(f"unknown wall class '{interaction_class}'")
        normal = np.asarray(normal, dtype=float).reshape(3)
        length = np.linalg.norm(normal)
        if length == 0:
            raise InvalidParameterError("half-space normal must be non-zero")
        self.point = np.asarray(point, dtype=float).reshape(3)
        self.normal = normal / length
        self.interaction_class = interaction_class
        self.name = name

    def velocity_at(self, time):
        return np.zeros(3)

    def gaps(self, positions, radii, time):
        """
        Returns:
            (gap (n,), normal (n, 3), wall velocity (3,))
        """
        positions = np.atleast_2d(np.asarray(positions, dtype=float))
        distance = (positions - self.point) @ self.normal
        gap = distance - np.asarray(radii, dtype=float)
        normal = np.broadcast_to(self.normal, positions.shape).copy()
        return gap, normal, self.velocity_at(time)

    def top_height(self, time=0.0):
        return float(self.point[2])


class AxisAlignedBox:
    """Box [x_min, x_max] x (-inf, inf) x [z_min, z_max], optionally moving"""

    def __init__(self, x_min, x_max, z_min, z_max, interaction_class='wall',
                 name='box', motion=None):
        if interaction_class not in WALL_CLASSES:
            raise InvalidParameterError(f"unknown wall class '{interaction_class}'")
        if not (x_max > x_min and z_max > z_min):
            raise InvalidParameterError(f"box '{name}' has non-positive extent")
        self.x_min = float(x_min)
        self.x_max = float(x_max)
        self.z_min = float(z_min)
        self.z_max = float(z_max)
        self.interaction_class = interaction_class
        self.name = name
        self.motion = motion

    def bounds_at(self, time):
        """(x_min, x_max, z_min, z_max) after applying the motion"""
        if self.motion is None:
            return self.x_min, self.x_max, self.z_min, self.z_max
        shift = self.motion.displacement_at(time)
        return (self.x_min + shift[0], self.x_max + shift[0],
                self.z_min + shift[2], self.z_max + shift[2])

    def velocity_at(self, time):
        if self.motion is None:
            return np.zeros(3)
        return np.asarray(self.motion.velocity_at(time), dtype=float)

    def top_height(self, time=0.0):
        return self.bounds_at(time)[3]

    def gaps(self, positions, radii, time):
        """
        Returns:
            (gap (n,), normal (n, 3), wall velocity (3,))
        """
        positions = np.atleast_2d(np.asarray(positions, dtype=float))
        radii = np.asarray(radii, dtype=float)
        x_lo, x_hi, z_lo, z_hi = self.bounds_at(time)
        px = positions[:, 0]
        pz = positions[:, 2]

        dx = px - np.clip(px, x_lo, x_hi)
        dz = pz - np.clip(pz, z_lo, z_hi)
        distance = np.sqrt(dx * dx + dz * dz)
        outside = distance > 0.0

        # centers inside the box: push out through the nearest face
        depths = np.stack([px - x_lo, x_hi - px, pz - z_lo, z_hi - pz], axis=1)
        face = np.argmin(depths, axis=1)
        depth = depths[np.arange(len(px)), face]
        face_normals = np.array([[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0],
                                 [0.0, 0.0, -1.0], [0.0, 0.0, 1.0]])

        safe = np.where(outside, distance, 1.0)
        normal = np.zeros((len(px), 3))
        normal[:, 0] = dx / safe
        normal[:, 2] = dz / safe
        normal = np.where(outside[:, None], normal, face_normals[face])
        gap = np.where(outside, distance, -depth) - radii
        return gap, normal, self.velocity_at(time)


def particle_wall_gap(particle, wall, time):
    """
    Gap query for a single particle

    Args:
        particle: Particle (position, radius)
        wall: HalfSpace or AxisAlignedBox
        time: simulation time [s]
    Returns:
        (gap [m], normal (3,), wall velocity (3,), interaction class)
    """
    gap, normal, velocity = wall.gaps(np.asarray(particle.position).reshape(1, 3),
                                      np.array([particle.radius]), time)
    return float(gap[0]), normal[0], velocity, wall.interaction_class
