"""
Particle State and Material Table

Holds:
- MaterialTable: per-interaction-class mechanical parameters
- Particle: one spherical grain (value snapshot for single-particle queries)
- ParticleState: struct-of-arrays storage used by the engine
"""

import sys
import os
import math
from dataclasses import dataclass, field

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.material_config import (
    PARTICLE_DENSITY,
    GRAVITY,
    GAMMA_0,
    HAMAKER_CONSTANT,
    CUTOFF_FACTOR,
    FRICTION,
    RESTITUTION,
    ROLLING_FRICTION,
    ROLLING_DEADBAND,
    NORMAL_STIFFNESS_RULE
)
from dem.errors import InvalidParameterError

INTERACTION_CLASSES = ('particle', 'blade', 'wall')


def normal_stiffness_for(gamma, gamma_0=GAMMA_0):
    """Penalty stiffness k_N paired with a surface energy (auto rule)"""
    ratio = gamma / gamma_0 if gamma_0 > 0 else 0.0
    for upper, k_n in NORMAL_STIFFNESS_RULE:
        if ratio <= upper:
            return k_n
    return NORMAL_STIFFNESS_RULE[-1][1]


@dataclass
class MaterialTable:
    """Mechanical parameters for particle, blade and wall interactions"""

    rho: float = PARTICLE_DENSITY
    gravity: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, -GRAVITY]))
    gamma: float = GAMMA_0
    gamma_blade: float = GAMMA_0
    gamma_wall: float = GAMMA_0
    hamaker: float = HAMAKER_CONSTANT
    k_n: float = 0.05
    k_t: float = 0.05
    mu: float = FRICTION
    mu_wall: float = FRICTION
    mu_roll: float = ROLLING_FRICTION
    restitution: float = RESTITUTION
    cutoff_factor: float = CUTOFF_FACTOR
    rolling_deadband: float = ROLLING_DEADBAND

    def __post_init__(self):
        self.gravity = np.asarray(self.gravity, dtype=float).reshape(3)
        self.validate()

    def validate(self):
        """Check ranges; raises InvalidParameterError"""
        scalars = {
            'rho': self.rho, 'gamma': self.gamma, 'gamma_blade': self.gamma_blade,
            'gamma_wall': self.gamma_wall, 'hamaker': self.hamaker, 'k_n': self.k_n,
            'k_t': self.k_t, 'mu': self.mu, 'mu_wall': self.mu_wall,
            'mu_roll': self.mu_roll, 'cutoff_factor': self.cutoff_factor,
            'rolling_deadband': self.rolling_deadband,
        }
        for name, value in scalars.items():
            if not math.isfinite(value) or value < 0:
                raise InvalidParameterError(f"{name} must be finite and >= 0, got {value}")
        if self.k_n <= 0:
            raise InvalidParameterError(f"k_n must be > 0, got {self.k_n}")
        if self.rho <= 0:
            raise InvalidParameterError(f"rho must be > 0, got {self.rho}")
        if not 0.0 < self.restitution <= 1.0:
            raise InvalidParameterError(f"restitution must be in (0, 1], got {self.restitution}")
        if self.hamaker == 0 and max(self.gamma, self.gamma_blade, self.gamma_wall) > 0:
            raise InvalidParameterError("hamaker must be > 0 when any surface energy is > 0")

    def interaction(self, interaction_class):
        """
        Surface energy and friction for an interaction class

        Returns:
            (gamma, mu)
        """
        if interaction_class == 'particle':
            return self.gamma, self.mu
        if interaction_class == 'blade':
            return self.gamma_blade, self.mu
        if interaction_class == 'wall':
            return self.gamma_wall, self.mu_wall
        raise InvalidParameterError(f"unknown interaction class '{interaction_class}'")

    def cutoff_gap(self, gamma):
        """Adhesion cutoff gap for a surface energy (0 when adhesion is off)"""
        if gamma <= 0:
            return 0.0
        return self.cutoff_factor * math.sqrt(self.hamaker / (24.0 * math.pi * gamma))

    @property
    def g_cut(self):
        """Largest cutoff over all interaction classes"""
        return max(self.cutoff_gap(g) for g in (self.gamma, self.gamma_blade, self.gamma_wall))

    def particle_mass(self, radius):
        return (4.0 / 3.0) * math.pi * np.asarray(radius) ** 3 * self.rho


@dataclass
class Particle:
    """One spherical grain"""

    id: int
    position: np.ndarray
    velocity: np.ndarray
    omega: np.ndarray
    radius: float
    mass: float
    inertia: float
    force: np.ndarray
    torque: np.ndarray


class ParticleState:
    """Positions, velocities and inertial data of all particles"""

    def __init__(self, positions, radii, material, velocities=None, omegas=None,
                 ids=None, time=0.0):
        self.position = np.array(positions, dtype=float).reshape(-1, 3)
        count = len(self.position)
        self.radius = np.array(radii, dtype=float).reshape(count)
        if np.any(self.radius <= 0):
            raise InvalidParameterError("particle radii must be > 0")
        self.velocity = (np.zeros((count, 3)) if velocities is None
                         else np.array(velocities, dtype=float).reshape(count, 3))
        self.omega = (np.zeros((count, 3)) if omegas is None
                      else np.array(omegas, dtype=float).reshape(count, 3))
        self.ids = (np.arange(count, dtype=np.int64) if ids is None
                    else np.array(ids, dtype=np.int64).reshape(count))
        self.mass = (4.0 / 3.0) * math.pi * self.radius ** 3 * material.rho
        self.inertia = 0.4 * self.mass * self.radius ** 2
        self.force = np.zeros((count, 3))
        self.torque = np.zeros((count, 3))
        self.time = float(time)
        self.forces_valid = False

    @property
    def count(self):
        return len(self.radius)

    def __len__(self):
        return self.count

    @property
    def min_mass(self):
        if self.count == 0:
            raise InvalidParameterError("empty particle state has no minimum mass")
        return float(self.mass.min())

    def particle(self, index):
        """Return a value copy of one particle"""
        return Particle(
            id=int(self.ids[index]),
            position=self.position[index].copy(),
            velocity=self.velocity[index].copy(),
            omega=self.omega[index].copy(),
            radius=float(self.radius[index]),
            mass=float(self.mass[index]),
            inertia=float(self.inertia[index]),
            force=self.force[index].copy(),
            torque=self.torque[index].copy()
        )

    def speeds(self):
        return np.sqrt(np.einsum('ij,ij->i', self.velocity, self.velocity))

    def max_speed(self):
        return float(self.speeds().max()) if self.count else 0.0

    def subset(self, mask, material):
        """New state holding only the selected particles"""
        sub = ParticleState(self.position[mask], self.radius[mask], material,
                            self.velocity[mask], self.omega[mask], self.ids[mask], self.time)
        return sub
