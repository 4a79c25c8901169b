"""
Unit Tests for the Force Engine and Integrator

Tests free flight, restitution, pair-force and energy conservation and the
time-step guard
"""

import sys
import os
import unittest

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from dem.cell_grid import CellGrid
from dem.contact_laws import critical_timestep
from dem.diagnostics import kinetic_energy, max_tangential_ratio, total_energy
from dem.errors import TimestepGuardError, OutOfDomainError
from dem.force_engine import ForceEngine
from dem.integrator import VelocityVerletIntegrator, integrate_step
from dem.particles import MaterialTable, ParticleState
from geometry.walls import HalfSpace

RADIUS = 20e-6


def make_engine(material, walls=(), periodic_y=False, mode='deterministic', threads=1,
                chunk_size=50_000):
    lower = np.array([-4e-4, -4e-4, -4e-4])
    upper = np.array([4e-4, 4e-4, 4e-4])
    grid = CellGrid.for_particles(lower, upper, 2 * RADIUS, material.g_cut, 0.0, periodic_y)
    return ForceEngine(material, grid, walls, 0.0, mode, threads, chunk_size)


class TestFreeFlight(unittest.TestCase):
    """Single particles without contacts"""

    def test_constant_velocity(self):
        material = MaterialTable(gravity=(0.0, 0.0, 0.0), gamma=0.0, gamma_blade=0.0,
                                 gamma_wall=0.0)
        state = ParticleState([[0.0, 0.0, 0.0]], [RADIUS], material,
                              velocities=[[1e-3, -2e-3, 5e-4]])
        integrator = VelocityVerletIntegrator(make_engine(material), dt=1e-6)
        integrator.run(state, 100)
        np.testing.assert_allclose(state.position[0], [1e-7, -2e-7, 5e-8], rtol=1e-9)
        self.assertAlmostEqual(state.time, 1e-4, delta=1e-15)

    def test_gravity_is_exact(self):
        """Velocity Verlet integrates constant acceleration exactly"""
        material = MaterialTable(gamma=0.0, gamma_blade=0.0, gamma_wall=0.0)
        state = ParticleState([[0.0, 0.0, 1e-4]], [RADIUS], material)
        integrator = VelocityVerletIntegrator(make_engine(material), dt=2e-6)
        integrator.run(state, 50)
        t = 1e-4
        self.assertAlmostEqual(state.position[0, 2], 1e-4 - 0.5 * 9.81 * t * t, delta=1e-15)
        self.assertAlmostEqual(state.velocity[0, 2], -9.81 * t, delta=1e-12)

    def test_throwaway_step(self):
        material = MaterialTable(gamma=0.0, gamma_blade=0.0, gamma_wall=0.0)
        state = ParticleState([[0.0, 0.0, 0.0]], [RADIUS], material)
        integrate_step(state, 1e-6, make_engine(material))
        self.assertAlmostEqual(state.velocity[0, 2], -9.81e-6, delta=1e-15)


class TestCollisions(unittest.TestCase):
    """Two-particle and particle-wall impacts"""

    def setUp(self):
        self.material = MaterialTable(gravity=(0.0, 0.0, 0.0), gamma=0.0, gamma_blade=0.0,
                                      gamma_wall=0.0)

    def _head_on(self, material, speed=0.01, dt_fraction=0.1):
        state = ParticleState([[-RADIUS - 1e-7, 0.0, 0.0], [RADIUS + 1e-7, 0.0, 0.0]],
                              [RADIUS, RADIUS], material,
                              velocities=[[speed, 0.0, 0.0], [-speed, 0.0, 0.0]])
        engine = make_engine(material)
        dt = None
        if dt_fraction is not None:
            dt = dt_fraction * critical_timestep(material, state.min_mass)
        integrator = VelocityVerletIntegrator(engine, dt=dt)
        for _ in range(5000):
            integrator.step(state)
            gap = state.position[1, 0] - state.position[0, 0] - 2 * RADIUS
            if gap > 1e-7 and state.velocity[1, 0] > 0:
                break
        return state, engine

    def test_restitution(self):
        """Rebound ratio equals c_COR = 0.4 for a head-on impact without adhesion"""
        state, _ = self._head_on(self.material)
        ratio = (state.velocity[1, 0] - state.velocity[0, 0]) / 0.02
        self.assertAlmostEqual(ratio, 0.4, delta=0.02)

    def test_restitution_at_default_step(self):
        """The production step of 0.9 dt_crit keeps the rebound ratio"""
        state, _ = self._head_on(self.material, dt_fraction=None)
        ratio = (state.velocity[1, 0] - state.velocity[0, 0]) / 0.02
        self.assertAlmostEqual(ratio, 0.4, delta=0.02)

    def test_momentum_conserved(self):
        state, _ = self._head_on(self.material)
        momentum = state.mass[:, None] * state.velocity
        np.testing.assert_allclose(momentum.sum(axis=0), 0.0, atol=1e-22)

    def test_energy_conserved_when_elastic(self):
        material = MaterialTable(gravity=(0.0, 0.0, 0.0), gamma=0.0, gamma_blade=0.0,
                                 gamma_wall=0.0, restitution=1.0)
        before = kinetic_energy(ParticleState([[0, 0, 0], [1, 0, 0]], [RADIUS, RADIUS], material,
                                              velocities=[[0.01, 0, 0], [-0.01, 0, 0]]))
        state, _ = self._head_on(material)
        self.assertAlmostEqual(kinetic_energy(state) / before, 1.0, delta=0.01)

    def test_adhesion_captures_slow_impact(self):
        """A slow pair with adhesion stays together"""
        material = MaterialTable(gravity=(0.0, 0.0, 0.0), gamma=4e-4, gamma_blade=0.0,
                                 gamma_wall=0.0, k_n=0.2)
        state, _ = self._head_on(material, speed=1e-4)
        gap = state.position[1, 0] - state.position[0, 0] - 2 * RADIUS
        self.assertLess(gap, 1e-7)

    def test_wall_rebound(self):
        wall = HalfSpace([0.0, 0.0, 0.0], [0.0, 0.0, 1.0])
        state = ParticleState([[0.0, 0.0, RADIUS + 1e-7]], [RADIUS], self.material,
                              velocities=[[0.0, 0.0, -0.01]])
        engine = make_engine(self.material, walls=[wall])
        integrator = VelocityVerletIntegrator(
            engine, dt=critical_timestep(self.material, state.min_mass) / 10.0)
        for _ in range(5000):
            integrator.step(state)
            if state.position[0, 2] > RADIUS + 1e-7:
                break
        self.assertAlmostEqual(state.velocity[0, 2] / 0.01, 0.4, delta=0.02)

    def test_sliding_respects_cap(self):
        """A spinning particle pressed on a wall never exceeds the Coulomb cone"""
        material = MaterialTable(gamma=0.0, gamma_blade=0.0, gamma_wall=0.0)
        wall = HalfSpace([0.0, 0.0, 0.0], [0.0, 0.0, 1.0])
        state = ParticleState([[0.0, 0.0, RADIUS - 1e-8]], [RADIUS], material,
                              velocities=[[0.02, 0.0, 0.0]], omegas=[[0.0, 50.0, 0.0]])
        engine = make_engine(material, walls=[wall])
        integrator = VelocityVerletIntegrator(
            engine, dt=critical_timestep(material, state.min_mass) / 10.0)
        for _ in range(200):
            integrator.step(state)
            self.assertLessEqual(max_tangential_ratio(engine), 1.0 + 1e-9)


def jittered_lattice(pitch, jitter, seed):
    rng = np.random.default_rng(seed)
    positions = np.stack(np.meshgrid(*[np.arange(3) * pitch] * 3, indexing='ij'),
                         axis=-1).reshape(-1, 3) - pitch
    return positions + rng.uniform(-jitter, jitter, positions.shape), rng


class TestConservation(unittest.TestCase):
    """Pair forces cancel and damped contacts never gain energy"""

    def test_pair_forces_antisymmetric(self):
        material = MaterialTable(gravity=(0.0, 0.0, 0.0), gamma=1e-4)
        positions, rng = jittered_lattice(2 * RADIUS, 0.3e-6, 5)
        state = ParticleState(positions, np.full(len(positions), RADIUS), material,
                              velocities=rng.normal(scale=1e-3, size=positions.shape))
        engine = make_engine(material)
        VelocityVerletIntegrator(engine).run(state, 5)

        i, j, force_i = engine.pair_forces(state)
        self.assertGreater(len(i), 0)
        rebuilt = np.zeros_like(state.force)
        np.add.at(rebuilt, i, force_i)
        np.add.at(rebuilt, j, -force_i)
        scale = np.max(np.abs(force_i))
        np.testing.assert_allclose(state.force, rebuilt, rtol=0.0, atol=1e-12 * scale)
        self.assertLess(np.max(np.abs(state.force.sum(axis=0))) / scale, 1e-12)

    def test_energy_never_increases_with_damping(self):
        material = MaterialTable(gravity=(0.0, 0.0, 0.0), gamma=0.0, gamma_blade=0.0,
                                 gamma_wall=0.0, restitution=0.4)
        positions, rng = jittered_lattice(2 * RADIUS - 0.4e-6, 0.1e-6, 9)
        state = ParticleState(positions, np.full(len(positions), RADIUS), material,
                              velocities=rng.normal(scale=5e-3, size=positions.shape))
        engine = make_engine(material)
        integrator = VelocityVerletIntegrator(engine)
        integrator.prime(state)
        start = total_energy(state, engine)
        previous = start
        for _ in range(400):
            integrator.step(state)
            energy = total_energy(state, engine)
            self.assertLessEqual(energy, previous + 1e-2 * start)
            previous = energy
        self.assertLess(previous, start)


class TestDeterminism(unittest.TestCase):
    """Reduction order does not depend on the force mode"""

    def test_fast_mode_matches_deterministic(self):
        material = MaterialTable(gamma=1e-4)
        rng = np.random.default_rng(3)
        positions = np.stack(np.meshgrid(*[np.arange(6) * 41e-6] * 3, indexing='ij'),
                             axis=-1).reshape(-1, 3) - 100e-6
        positions += rng.uniform(-1e-6, 1e-6, positions.shape)
        velocities = rng.normal(scale=1e-3, size=positions.shape)
        results = []
        for mode, threads in (('deterministic', 1), ('fast', 4)):
            state = ParticleState(positions, np.full(len(positions), RADIUS), material,
                                  velocities=velocities)
            engine = make_engine(material, mode=mode, threads=threads, chunk_size=16)
            integrator = VelocityVerletIntegrator(engine, dt=1e-6)
            integrator.run(state, 20)
            results.append(state.position.copy())
        np.testing.assert_array_equal(results[0], results[1])


class TestGuards(unittest.TestCase):
    """Time-step and domain guards"""

    def setUp(self):
        self.material = MaterialTable(gamma=0.0, gamma_blade=0.0, gamma_wall=0.0)

    def test_refuses_unstable_step(self):
        state = ParticleState([[0.0, 0.0, 0.0]], [10e-6], self.material)
        dt_crit = critical_timestep(self.material, state.min_mass)
        integrator = VelocityVerletIntegrator(make_engine(self.material), dt=1.01 * dt_crit)
        with self.assertRaises(TimestepGuardError):
            integrator.step(state)

    def test_override_allows_unstable_step(self):
        state = ParticleState([[0.0, 0.0, 0.0]], [10e-6], self.material)
        dt_crit = critical_timestep(self.material, state.min_mass)
        integrator = VelocityVerletIntegrator(make_engine(self.material), dt=1.01 * dt_crit,
                                              allow_unstable=True)
        integrator.step(state)
        self.assertEqual(integrator.steps, 1)

    def test_default_step_is_below_critical(self):
        state = ParticleState([[0.0, 0.0, 0.0]], [10e-6], self.material)
        integrator = VelocityVerletIntegrator(make_engine(self.material))
        integrator.step(state)
        self.assertAlmostEqual(integrator.dt / critical_timestep(self.material, state.min_mass),
                               0.9, places=12)

    def test_particle_leaving_domain(self):
        state = ParticleState([[3.9e-4, 0.0, 0.0]], [RADIUS], self.material,
                              velocities=[[10.0, 0.0, 0.0]])
        integrator = VelocityVerletIntegrator(make_engine(self.material), dt=1e-6)
        with self.assertRaises(OutOfDomainError) as context:
            integrator.run(state, 100)
        self.assertEqual(context.exception.particle_id, 0)


if __name__ == "__main__":
    unittest.main()
