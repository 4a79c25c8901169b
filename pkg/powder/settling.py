"""
Gravity Settling

Integrates until the pile is quiet, then reports its bulk packing,
surface height and force balance.
"""

import sys
import os
from dataclasses import dataclass

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.metrics_config import (
    VOXEL_DIVISOR,
    SETTLE_SPEED_THRESHOLD,
    SETTLE_QUIET_STEPS,
    SETTLE_MAX_STEPS,
    SETTLED_FORCE_TOLERANCE
)
from config.process_config import NOMINAL_MAX_DIAMETER
from dem.diagnostics import (
    kinetic_energy,
    coordination_number,
    max_relative_penetration
)
from dem.errors import InvalidParameterError
from metrics.grid_spec import MetricGridSpec
from metrics.packing_fraction import solid_volume_in_box
from metrics.surface_profile import surface_profile_raw


@dataclass
class SettleCriterion:
    """When a pile counts as static"""

    speed_threshold: float = SETTLE_SPEED_THRESHOLD
    quiet_steps: int = SETTLE_QUIET_STEPS
    max_steps: int = SETTLE_MAX_STEPS

    def __post_init__(self):
        if not self.speed_threshold > 0:
            raise InvalidParameterError("settle speed threshold must be > 0")
        if not self.max_steps > 0 or not self.quiet_steps > 0:
            raise InvalidParameterError("settle step counts must be > 0")


def pile_surface_height(positions, radii, x_range, y_range, pitch, period_y=None):
    """Mean height of the ray-cast surface over a rectangle"""
    spec = MetricGridSpec(ray_pitch=pitch, segment_size=2 * pitch, bin_size=4 * pitch,
                          voxel_size=pitch, window=(x_range[0], x_range[1], y_range[0], y_range[1]),
                          substrate_height=-np.inf, period_y=period_y)
    raw = surface_profile_raw(positions, radii, spec)
    hit = np.isfinite(raw.values)
    if not np.any(hit):
        return None
    return float(np.mean(raw.values[hit]))


def interior_packing_fraction(positions, radii, pile_lower, pile_upper_xy, voxel,
                              d_max0=NOMINAL_MAX_DIAMETER, period_y=None):
    """
    Bulk packing of a pile, inset by d_max0 from its boundaries

    Args:
        pile_lower: (x, y, z) of the pile's lower corner (z = floor)
        pile_upper_xy: (x, y) upper corner; the top is the mean surface height
        period_y: y period, no inset is applied along a periodic axis
    Returns:
        (packing fraction or None if the interior is empty, surface height)
    """
    x_range = (pile_lower[0], pile_upper_xy[0])
    y_range = (pile_lower[1], pile_upper_xy[1])
    top = pile_surface_height(positions, radii, x_range, y_range, 2.0 * voxel, period_y)
    if top is None:
        return None, None
    y_inset = 0.0 if period_y is not None else d_max0
    lower = np.array([x_range[0] + d_max0, y_range[0] + y_inset, pile_lower[2] + d_max0])
    upper = np.array([x_range[1] - d_max0, y_range[1] - y_inset, top - d_max0])
    if np.any(upper <= lower):
        return None, top
    volume = solid_volume_in_box(positions, radii, lower, upper, voxel, period_y)
    return volume / float(np.prod(upper - lower)), top


def force_balance(state, material, tolerance=SETTLED_FORCE_TOLERANCE, surface_height=None,
                  d_max0=NOMINAL_MAX_DIAMETER):
    """
    Fraction of non-surface particles whose net force is below tolerance * m g

    Particles within d_max0 of the surface height count as the top monolayer.
    """
    if state.count == 0:
        return 1.0
    weight = state.mass * np.linalg.norm(material.gravity)
    net = np.linalg.norm(state.force, axis=1)
    interior = np.ones(state.count, dtype=bool)
    if surface_height is not None:
        interior = state.position[:, 2] + state.radius < surface_height - d_max0
    if not np.any(interior):
        return 1.0
    return float(np.mean(net[interior] < tolerance * weight[interior]))


@dataclass
class PileRegion:
    """Where a settled pile's bulk packing is measured; the top is its mean surface"""

    lower: tuple
    upper_xy: tuple
    voxel: float
    d_max0: float = NOMINAL_MAX_DIAMETER
    period_y: float = None

    @classmethod
    def around(cls, state, grid=None):
        """Bounding box of the particles, full period along a periodic y axis"""
        if state.count == 0:
            return None
        low = np.min(state.position - state.radius[:, None], axis=0)
        high = np.max(state.position + state.radius[:, None], axis=0)
        period_y = None
        if grid is not None and grid.periodic_y:
            period_y = grid.L_y
            low[1] = grid.lower[1]
            high[1] = grid.lower[1] + period_y
        return cls(lower=tuple(low), upper_xy=(high[0], high[1]),
                   voxel=2.0 * float(np.min(state.radius)) / VOXEL_DIVISOR,
                   d_max0=2.0 * float(np.max(state.radius)), period_y=period_y)


def settle(integrator, state, criterion, progress=None, progress_every=10_000, region=None):
    """
    Integrate until max speed stays below the threshold

    Args:
        integrator: VelocityVerletIntegrator
        state: ParticleState
        criterion: SettleCriterion
        progress: optional callable(step, max_speed)
        region: PileRegion for the packing measurement, defaults to the
            particles' bounding box
    Returns:
        (state, report dict); report['converged'] is False when the step
        cap was reached
    """
    quiet = 0
    steps = 0
    speed = state.max_speed()
    converged = False
    while steps < criterion.max_steps:
        integrator.step(state)
        steps += 1
        speed = state.max_speed()
        quiet = quiet + 1 if speed < criterion.speed_threshold else 0
        if quiet >= criterion.quiet_steps:
            converged = True
            break
        if progress is not None and steps % progress_every == 0:
            progress(steps, speed)

    engine = integrator.engine
    if region is None:
        region = PileRegion.around(state, engine.grid)
    phi, top = None, None
    if region is not None:
        phi, top = interior_packing_fraction(state.position, state.radius, region.lower,
                                             region.upper_xy, region.voxel, region.d_max0,
                                             region.period_y)
    d_max0 = region.d_max0 if region is not None else NOMINAL_MAX_DIAMETER
    report = {
        'converged': converged,
        'steps': steps,
        'time': state.time,
        'max_speed': speed,
        'kinetic_energy': kinetic_energy(state),
        'coordination_number': coordination_number(engine, state.count),
        'max_relative_penetration': max_relative_penetration(engine),
        'packing_fraction': phi,
        'surface_height': top,
        'force_balance': force_balance(state, integrator.material, surface_height=top,
                                       d_max0=d_max0),
        'force_tolerance': SETTLED_FORCE_TOLERANCE,
    }
    return state, report
