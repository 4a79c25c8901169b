"""
Velocity Verlet Integrator

Advances positions, velocities and angular velocities of a ParticleState.
Velocity-dependent forces (dashpot, friction) are evaluated with the
half-step velocities.
"""

import sys
import os

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.material_config import TIMESTEP_FACTOR
from dem.contact_laws import critical_timestep
from dem.errors import InvalidParameterError, TimestepGuardError
from geometry.boundaries import wrap_y


class VelocityVerletIntegrator:
    """Explicit time stepping with a critical-step guard"""

    def __init__(self, engine, dt=None, allow_unstable=False, L_y=None):
        self.engine = engine
        self.material = engine.material
        self.dt = dt
        self.allow_unstable = allow_unstable
        self.L_y = L_y if L_y is not None else (engine.grid.L_y if engine.grid.periodic_y else None)
        self.steps = 0

    def default_timestep(self, state):
        """0.9 of the critical step for the lightest particle"""
        return TIMESTEP_FACTOR * critical_timestep(self.material, state.min_mass)

    def check_timestep(self, state, dt):
        """
        Refuse steps above the critical value

        Raises:
            TimestepGuardError unless allow_unstable is set
        """
        if not dt > 0:
            raise InvalidParameterError(f"time step must be > 0, got {dt}")
        if state.count == 0:
            return
        dt_crit = critical_timestep(self.material, state.min_mass)
        if dt > dt_crit and not self.allow_unstable:
            raise TimestepGuardError(dt, dt_crit)

    def prime(self, state, dt=0.0):
        """Evaluate forces for the current configuration"""
        self.engine.compute(state, dt)

    def step(self, state, dt=None):
        """
        One velocity Verlet step

        Returns:
            the same state, advanced by dt
        """
        dt = self.dt if dt is None else dt
        if dt is None:
            dt = self.default_timestep(state)
            self.dt = dt
        self.check_timestep(state, dt)
        if state.count == 0:
            state.time += dt
            return state
        if not state.forces_valid:
            self.prime(state)

        inv_mass = 1.0 / state.mass[:, None]
        inv_inertia = 1.0 / state.inertia[:, None]
        half = 0.5 * dt

        state.velocity = state.velocity + half * state.force * inv_mass
        state.omega = state.omega + half * state.torque * inv_inertia
        state.position = state.position + dt * state.velocity
        if self.L_y is not None:
            state.position = wrap_y(state.position, self.L_y)
        state.time += dt

        self.engine.compute(state, dt)

        state.velocity = state.velocity + half * state.force * inv_mass
        state.omega = state.omega + half * state.torque * inv_inertia
        self.steps += 1
        return state

    def run(self, state, n_steps, dt=None, callback=None):
        """Advance n_steps; callback(state, step) after each one"""
        for k in range(int(n_steps)):
            self.step(state, dt)
            if callback is not None:
                callback(state, k)
        return state


def integrate_step(state, dt, engine, allow_unstable=False):
    """Advance a state by one step with a throwaway integrator"""
    integrator = VelocityVerletIntegrator(engine, dt, allow_unstable)
    return integrator.step(state, dt)
