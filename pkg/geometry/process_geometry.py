"""
Process Geometry

Layout of the recoating setup (x = recoating direction, y periodic, z up):

    reservoir | separator | powder bed (substrate z=0) | right wall | overflow pit
    platform rises in the reservoir, the blade travels in +x from the
    reservoir's left edge past the right wall.

The separator and right wall tops sit at the nominal layer height t0, so
the bed is a recess of depth t0. The blade's lower edge runs d_min/2 above
those tops.
"""

import sys
import os
import math

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.process_config import (
    BLADE_THICKNESS,
    BLADE_HEIGHT_FACTOR,
    NOMINAL_MAX_DIAMETER,
    PLATFORM_DWELL,
    WALL_THICKNESS
)
from dem.errors import InvalidParameterError
from geometry.walls import AxisAlignedBox


class BladeKinematics:
    """Rigid rectangular blade moving in +x at constant speed"""

    def __init__(self, velocity, start_x=0.0, start_time=0.0, thickness=BLADE_THICKNESS,
                 height=BLADE_HEIGHT_FACTOR * NOMINAL_MAX_DIAMETER):
        if not velocity > 0:
            raise InvalidParameterError(f"blade velocity must be > 0, got {velocity}")
        if not (thickness > 0 and height > 0):
            raise InvalidParameterError("blade thickness and height must be > 0")
        self.velocity = float(velocity)
        self.start_x = float(start_x)
        self.start_time = float(start_time)
        self.thickness = float(thickness)
        self.height = float(height)

    def position_at(self, time):
        return blade_position_at(self, time)

    def displacement_at(self, time):
        return np.array([self.position_at(time) - self.start_x, 0.0, 0.0])

    def velocity_at(self, time):
        if time >= self.start_time:
            return np.array([self.velocity, 0.0, 0.0])
        return np.zeros(3)

    def time_to_reach(self, x):
        """Time at which the front face reaches x"""
        return self.start_time + max(0.0, x - self.start_x) / self.velocity


def blade_position_at(kinematics, time):
    """
    Front-face x position of the blade

    Returns:
        x0 + V_B * max(0, time - start_time)
    """
    if time < 0:
        raise InvalidParameterError(f"time must be >= 0, got {time}")
    return kinematics.start_x + kinematics.velocity * max(0.0, time - kinematics.start_time)


class PlatformSchedule:
    """Quasi-static rise of the reservoir platform"""

    def __init__(self, rise_height=0.0, rise_duration=0.0, dwell=PLATFORM_DWELL,
                 start_time=math.inf):
        if rise_height < 0 or rise_duration < 0 or dwell < 0:
            raise InvalidParameterError("platform rise height, duration and dwell must be >= 0")
        if rise_height > 0 and rise_duration == 0:
            raise InvalidParameterError("a non-zero platform rise needs a positive duration")
        self.rise_height = float(rise_height)
        self.rise_duration = float(rise_duration)
        self.dwell = float(dwell)
        self.start_time = float(start_time)

    def schedule(self, start_time, rise_height, max_velocity):
        """Plan a rise of rise_height starting at start_time with speed <= max_velocity"""
        if not max_velocity > 0:
            raise InvalidParameterError(f"platform velocity must be > 0, got {max_velocity}")
        if rise_height < 0:
            raise InvalidParameterError(f"platform rise must be >= 0, got {rise_height}")
        self.start_time = float(start_time)
        self.rise_height = float(rise_height)
        self.rise_duration = self.rise_height / max_velocity

    @property
    def end_time(self):
        return self.start_time + self.rise_duration

    @property
    def blade_start_time(self):
        return self.end_time + self.dwell

    def fraction_at(self, time):
        if time <= self.start_time or self.rise_height == 0:
            return 0.0
        if time >= self.end_time:
            return 1.0
        return (time - self.start_time) / self.rise_duration

    def displacement_at(self, time):
        return np.array([0.0, 0.0, self.rise_height * self.fraction_at(time)])

    def velocity_at(self, time):
        if self.rise_height > 0 and self.start_time < time < self.end_time:
            return np.array([0.0, 0.0, self.rise_height / self.rise_duration])
        return np.zeros(3)


class ProcessGeometry:
    """Bed, reservoir, pit and blade with their rigid wall set"""

    def __init__(self, bed_length, bed_width, layer_thickness, d_min, reservoir_length,
                 reservoir_depth, blade, platform=None, wall_thickness=WALL_THICKNESS,
                 pit_length=1.0e-3, pit_depth=0.3e-3, window_length=None,
                 d_max0=NOMINAL_MAX_DIAMETER):
        positive = {
            'bed_length': bed_length, 'bed_width': bed_width,
            'layer_thickness': layer_thickness, 'd_min': d_min,
            'reservoir_length': reservoir_length, 'reservoir_depth': reservoir_depth,
            'wall_thickness': wall_thickness, 'pit_length': pit_length,
            'pit_depth': pit_depth, 'd_max0': d_max0,
        }
        for name, value in positive.items():
            if not value > 0:
                raise InvalidParameterError(f"{name} must be > 0, got {value}")
        self.bed_length = float(bed_length)
        self.bed_width = float(bed_width)
        self.layer_thickness = float(layer_thickness)
        self.blade_gap = 0.5 * float(d_min)
        self.reservoir_length = float(reservoir_length)
        self.reservoir_depth = float(reservoir_depth)
        self.wall_thickness = float(wall_thickness)
        self.pit_length = float(pit_length)
        self.pit_depth = float(pit_depth)
        self.d_max0 = float(d_max0)
        self.window_length = float(window_length) if window_length else self.bed_length
        if self.window_length > self.bed_length:
            raise InvalidParameterError("evaluation window is longer than the bed")
        self.blade = blade
        self.platform = platform if platform is not None else PlatformSchedule()
        self.blade.start_x = self.reservoir_left
        if self.pit_length < self.blade.thickness + 2.0 * self.d_max0:
            raise InvalidParameterError(
                "pit_length must exceed blade thickness + 2 d_max0 so the blade can clear the bed")

    # KEY COORDINATES

    @property
    def reservoir_right(self):
        return -self.wall_thickness

    @property
    def reservoir_left(self):
        return self.reservoir_right - self.reservoir_length

    @property
    def platform_top_initial(self):
        return self.layer_thickness - self.reservoir_depth

    @property
    def blade_bottom(self):
        """Lower blade edge: t0 + d_min/2 above the substrate"""
        return self.layer_thickness + self.blade_gap

    @property
    def blade_top(self):
        return self.blade_bottom + self.blade.height

    @property
    def pit_left(self):
        return self.bed_length + self.wall_thickness

    @property
    def pit_right(self):
        return self.pit_left + self.pit_length

    @property
    def blade_end_x(self):
        """Front-face position once the blade's back face has passed the right wall"""
        return self.pit_left + self.blade.thickness + self.d_max0

    def spread_end_time(self):
        return self.blade.time_to_reach(self.blade_end_x)

    def evaluation_window(self):
        """(x_min, x_max, y_min, y_max) centered on the bed"""
        margin = 0.5 * (self.bed_length - self.window_length)
        return margin, margin + self.window_length, 0.0, self.bed_width

    def reservoir_region(self):
        """Seeding box above the initial platform"""
        lower = np.array([self.reservoir_left, 0.0, self.platform_top_initial])
        upper = np.array([self.reservoir_right, self.bed_width, self.layer_thickness])
        return lower, upper

    def dispensed_volume(self, surplus_factor):
        """Solid volume the platform must push above the wall tops"""
        return surplus_factor * self.bed_length * self.bed_width * self.layer_thickness

    def domain_bounds(self, fill_top=None):
        """Simulation box (lower, upper) enclosing all walls and the fill"""
        margin = 2.0 * self.d_max0
        bottom = min(self.platform_top_initial, -self.pit_depth) - self.wall_thickness - margin
        top = max(self.blade_top, fill_top if fill_top is not None else self.blade_top) + margin
        left = self.reservoir_left - max(self.wall_thickness, self.blade.thickness)
        lower = np.array([left - margin, 0.0, bottom])
        upper = np.array([self.pit_right + self.wall_thickness + margin, self.bed_width, top])
        return lower, upper

    # WALLS

    def walls(self):
        """All rigid primitives, static ones first"""
        w = self.wall_thickness
        t0 = self.layer_thickness
        deep = self.platform_top_initial - w
        pit_floor = -self.pit_depth
        return [
            AxisAlignedBox(0.0, self.bed_length, -w, 0.0, 'wall', 'substrate'),
            AxisAlignedBox(self.reservoir_right, 0.0, deep, t0, 'wall', 'separator'),
            AxisAlignedBox(self.reservoir_left - w, self.reservoir_left, deep, t0, 'wall',
                           'reservoir_left'),
            AxisAlignedBox(self.bed_length, self.pit_left, pit_floor - w, t0, 'wall', 'bed_right'),
            AxisAlignedBox(self.pit_left, self.pit_right, pit_floor - w, pit_floor, 'wall',
                           'pit_floor'),
            AxisAlignedBox(self.pit_right, self.pit_right + w, pit_floor - w, self.blade_top,
                           'wall', 'pit_end'),
            AxisAlignedBox(self.reservoir_left, self.reservoir_right, deep,
                           self.platform_top_initial, 'wall', 'platform', motion=self.platform),
            AxisAlignedBox(self.reservoir_left - self.blade.thickness, self.reservoir_left,
                           self.blade_bottom, self.blade_top, 'blade', 'blade', motion=self.blade),
        ]

    # BOOKKEEPING

    def classify(self, positions, radii):
        """
        Particle counts per region

        Returns:
            dict with reservoir, bed, window, pit and above_layer counts
        """
        x = positions[:, 0]
        z = positions[:, 2]
        x0, x1, _, _ = self.evaluation_window()
        in_bed = (x >= 0.0) & (x <= self.bed_length)
        return {
            'reservoir': int(np.count_nonzero(x < self.reservoir_right)),
            'bed': int(np.count_nonzero(in_bed & (z <= self.blade_bottom))),
            'window': int(np.count_nonzero((x >= x0) & (x <= x1) & (z <= self.blade_bottom))),
            'pit': int(np.count_nonzero(x > self.bed_length)),
            'above_layer': int(np.count_nonzero(in_bed & (z - radii > self.layer_thickness))),
        }
