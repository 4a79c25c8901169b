"""
Force Engine

Evaluates every force and torque acting on the particles:
1. Gravity
2. Particle-particle contact, adhesion, friction, rolling resistance
3. Particle-wall interactions (blade or substrate/side-wall class)

Pair forces are accumulated with np.bincount in pair order, so the result
does not depend on thread scheduling. In "fast" mode the pair kernel runs
on chunks in a joblib thread pool and the chunks are concatenated in their
original order before accumulation.
"""

import sys
import os

import numpy as np
from joblib import Parallel, delayed

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from dem.contact_laws import (
    normal_contact_force,
    adhesion_force,
    net_normal_force,
    tangential_friction_force,
    rolling_resistance_torque,
    effective_radius,
    effective_mass
)
from dem.contact_history import ContactHistory
from dem.cell_grid import NeighborList
from dem.errors import InvalidParameterError
from geometry.boundaries import minimum_image

FORCE_MODES = ('deterministic', 'fast')


def _dot(a, b):
    return np.einsum('ij,ij->i', a, b)


def _accumulate(index, values, count):
    """Sum (n, 3) values into count rows"""
    return np.stack([np.bincount(index, weights=values[:, k], minlength=count)
                     for k in range(3)], axis=1)


class ForceEngine:
    """Compute forces and torques for a ParticleState"""

    def __init__(self, material, grid, walls=(), skin=0.0, mode='deterministic',
                 threads=1, chunk_size=50_000):
        if mode not in FORCE_MODES:
            raise InvalidParameterError(f"force mode must be one of {FORCE_MODES}, got '{mode}'")
        self.material = material
        self.grid = grid
        self.walls = list(walls)
        self.cutoff = material.cutoff_gap(material.gamma)
        self.neighbors = NeighborList(grid, self.cutoff, skin)
        self.pair_history = ContactHistory()
        self.wall_history = ContactHistory()
        self.mode = mode
        self.threads = max(1, int(threads))
        self.chunk_size = int(chunk_size)
        self.last_contacts = {}

    # PARTICLE-PARTICLE

    def _pair_terms(self, state, i, j, dt):
        """Forces on i and torques on i and j for candidate pairs (i, j)"""
        material = self.material
        delta = state.position[i] - state.position[j]
        if self.grid.periodic_y:
            delta[:, 1] = minimum_image(delta[:, 1], self.grid.L_y)
        distance = np.sqrt(_dot(delta, delta))
        gap = distance - state.radius[i] - state.radius[j]
        active = gap < self.cutoff
        i, j, delta, distance, gap = i[active], j[active], delta[active], distance[active], gap[active]
        keys = i * state.count + j

        normal = delta / distance[:, None]
        r_eff = effective_radius(state.radius[i], state.radius[j])
        m_eff = effective_mass(state.mass[i], state.mass[j])
        v_rel = state.velocity[i] - state.velocity[j]
        approach = -_dot(v_rel, normal)

        contact = normal_contact_force(gap, approach, m_eff, material)
        adhesive = adhesion_force(gap, r_eff, material.gamma, material)
        normal_force = net_normal_force(contact, adhesive, material.gamma, r_eff)

        touching = gap < 0.0
        lever_i = state.radius[i] + np.minimum(gap, 0.0) / 2.0
        lever_j = state.radius[j] + np.minimum(gap, 0.0) / 2.0
        spin = lever_i[:, None] * state.omega[i] + lever_j[:, None] * state.omega[j]
        v_contact = v_rel - np.cross(spin, normal)
        v_t = v_contact - _dot(v_contact, normal)[:, None] * normal

        xi = self.pair_history.lookup(keys)
        f_t, xi = tangential_friction_force(xi, v_t, contact, material.mu, material.k_t,
                                            dt, normal)
        f_t[~touching] = 0.0
        xi[~touching] = 0.0

        n_cross_f = np.cross(normal, f_t)
        torque_i = -lever_i[:, None] * n_cross_f
        torque_j = -lever_j[:, None] * n_cross_f
        inertia = effective_mass(state.inertia[i], state.inertia[j])
        rolling = rolling_resistance_torque(
            state.omega[i] - state.omega[j], contact, r_eff, material.mu_roll,
            material.rolling_deadband, normal=normal,
            inertia_eff=inertia if dt > 0 else None, dt=dt if dt > 0 else None)
        torque_i = torque_i + rolling
        torque_j = torque_j - rolling

        force_i = normal_force[:, None] * normal + f_t
        return {
            'i': i, 'j': j, 'keys': keys, 'xi': xi,
            'force_i': force_i, 'torque_i': torque_i, 'torque_j': torque_j,
            'gap': gap, 'r_eff': r_eff, 'f_t': f_t, 'contact': contact,
        }

    def _pair_contributions(self, state, dt):
        i, j = self.neighbors.pairs(state.position, state.radius, state.ids)
        if self.mode == 'fast' and self.threads > 1 and len(i) > self.chunk_size:
            bounds = range(0, len(i), self.chunk_size)
            parts = Parallel(n_jobs=self.threads, prefer='threads')(
                delayed(self._pair_terms)(state, i[s:s + self.chunk_size],
                                          j[s:s + self.chunk_size], dt)
                for s in bounds)
            return {key: np.concatenate([p[key] for p in parts]) for key in parts[0]}
        return self._pair_terms(state, i, j, dt)

    # PARTICLE-WALL

    def _wall_terms(self, state, wall_index, wall, dt):
        material = self.material
        gamma, mu = material.interaction(wall.interaction_class)
        gap, normal, wall_velocity = wall.gaps(state.position, state.radius, state.time)
        k = np.flatnonzero(gap < material.cutoff_gap(gamma))
        gap = gap[k]
        normal = normal[k]
        keys = k * len(self.walls) + wall_index

        r_eff = state.radius[k]
        v_rel = state.velocity[k] - wall_velocity
        approach = -_dot(v_rel, normal)
        contact = normal_contact_force(gap, approach, state.mass[k], material)
        adhesive = adhesion_force(gap, r_eff, gamma, material)
        normal_force = net_normal_force(contact, adhesive, gamma, r_eff)

        touching = gap < 0.0
        lever = state.radius[k] + np.minimum(gap, 0.0)
        v_contact = v_rel - lever[:, None] * np.cross(state.omega[k], normal)
        v_t = v_contact - _dot(v_contact, normal)[:, None] * normal

        xi = self.wall_history.lookup(keys)
        f_t, xi = tangential_friction_force(xi, v_t, contact, mu, material.k_t, dt, normal)
        f_t[~touching] = 0.0
        xi[~touching] = 0.0

        torque = -lever[:, None] * np.cross(normal, f_t)
        torque = torque + rolling_resistance_torque(
            state.omega[k], contact, r_eff, material.mu_roll, material.rolling_deadband,
            normal=normal, inertia_eff=state.inertia[k] if dt > 0 else None,
            dt=dt if dt > 0 else None)
        return {
            'k': k, 'keys': keys, 'xi': xi,
            'force': normal_force[:, None] * normal + f_t, 'torque': torque,
            'gap': gap, 'r_eff': r_eff, 'f_t': f_t, 'contact': contact,
            'class': wall.interaction_class,
        }

    # ACCUMULATION

    def compute(self, state, dt=0.0):
        """
        Overwrite state.force and state.torque with the current totals

        Args:
            state: ParticleState (velocities are read as given, the
                   integrator passes half-step velocities)
            dt: step used for the tangential spring increment
        """
        n = state.count
        force = state.mass[:, None] * self.material.gravity[None, :]
        torque = np.zeros((n, 3))

        pairs = self._pair_contributions(state, dt)
        if len(pairs['i']):
            force += _accumulate(pairs['i'], pairs['force_i'], n)
            force -= _accumulate(pairs['j'], pairs['force_i'], n)
            torque += _accumulate(pairs['i'], pairs['torque_i'], n)
            torque += _accumulate(pairs['j'], pairs['torque_j'], n)
        self.pair_history.replace(pairs['keys'], pairs['xi'])

        walls = [self._wall_terms(state, w, wall, dt) for w, wall in enumerate(self.walls)]
        for terms in walls:
            if len(terms['k']):
                force += _accumulate(terms['k'], terms['force'], n)
                torque += _accumulate(terms['k'], terms['torque'], n)
        if walls:
            self.wall_history.replace(np.concatenate([t['keys'] for t in walls]),
                                      np.concatenate([t['xi'] for t in walls]))

        state.force = force
        state.torque = torque
        state.forces_valid = True
        self.last_contacts = {'pairs': pairs, 'walls': walls}
        return state

    def pair_forces(self, state):
        """Per-pair force on the first particle of each active pair (for checks)"""
        pairs = self.last_contacts.get('pairs')
        if pairs is None:
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64), np.empty((0, 3))
        return pairs['i'], pairs['j'], pairs['force_i']
