"""
Unit Tests for Domain Geometry

Tests periodic helpers, wall gaps, blade and platform kinematics
"""

import sys
import os
import math
import unittest

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from dem.errors import InvalidParameterError
from dem.particles import MaterialTable, ParticleState
from geometry.boundaries import (
    wrap_y,
    minimum_image,
    periodic_distance,
    with_periodic_images
)
from geometry.walls import HalfSpace, AxisAlignedBox, particle_wall_gap
from geometry.process_geometry import (
    BladeKinematics,
    PlatformSchedule,
    ProcessGeometry,
    blade_position_at
)


class TestPeriodicBoundaries(unittest.TestCase):
    """Test the y-periodic helpers"""

    def test_wrap(self):
        wrapped = wrap_y(np.array([[1.0, -0.1e-3, 2.0], [0.0, 0.7e-3, 0.0]]), 0.5e-3)
        np.testing.assert_allclose(wrapped[:, 1], [0.4e-3, 0.2e-3], rtol=1e-12)
        np.testing.assert_array_equal(wrapped[:, 0], [1.0, 0.0])

    def test_wrap_tiny_negative(self):
        wrapped = wrap_y(np.array([0.0, -1e-30, 0.0]), 0.5e-3)
        self.assertGreaterEqual(wrapped[1], 0.0)
        self.assertLess(wrapped[1], 0.5e-3)

    def test_wrap_rejects_bad_period(self):
        with self.assertRaises(InvalidParameterError):
            wrap_y(np.zeros(3), 0.0)

    def test_minimum_image(self):
        self.assertAlmostEqual(float(minimum_image(0.45e-3, 0.5e-3)), -0.05e-3, delta=1e-18)
        self.assertAlmostEqual(float(minimum_image(-0.3e-3, 0.5e-3)), 0.2e-3, delta=1e-18)

    def test_distance_across_boundary(self):
        d = periodic_distance(np.array([0.0, 0.01e-3, 0.0]), np.array([0.0, 0.49e-3, 0.0]), 0.5e-3)
        self.assertAlmostEqual(float(d), 0.02e-3, delta=1e-18)

    def test_images(self):
        positions = np.array([[0.0, 5e-6, 0.0], [0.0, 2.5e-4, 0.0], [0.0, 4.98e-4, 0.0]])
        images, radii = with_periodic_images(positions, np.full(3, 10e-6), 5e-4)
        self.assertEqual(len(images), 5)
        self.assertAlmostEqual(images[3, 1], 5.05e-4, delta=1e-18)
        self.assertAlmostEqual(images[4, 1], -2e-6, delta=1e-18)


class TestWalls(unittest.TestCase):
    """Test the analytic wall primitives"""

    def test_half_space(self):
        wall = HalfSpace([0.0, 0.0, 0.0], [0.0, 0.0, 2.0])
        gap, normal, velocity = wall.gaps(np.array([[1.0, 1.0, 15e-6]]), np.array([10e-6]), 0.0)
        self.assertAlmostEqual(float(gap[0]), 5e-6, delta=1e-18)
        np.testing.assert_array_equal(normal[0], [0.0, 0.0, 1.0])
        np.testing.assert_array_equal(velocity, [0.0, 0.0, 0.0])

    def test_box_faces_and_edges(self):
        box = AxisAlignedBox(0.0, 1e-3, -1e-4, 0.0)
        positions = np.array([
            [5e-4, 0.0, 12e-6],         # above the top face
            [-12e-6, 0.0, -5e-5],        # left of the left face
            [1e-3 + 3e-6, 0.0, 4e-6],   # beyond the top-right edge
            [5e-4, 0.0, -2e-6],          # center inside, near the top
        ])
        gap, normal, _ = box.gaps(positions, np.full(4, 10e-6), 0.0)
        np.testing.assert_allclose(gap, [2e-6, 2e-6, 5e-6 - 10e-6, -12e-6], atol=1e-18)
        np.testing.assert_allclose(normal[0], [0.0, 0.0, 1.0])
        np.testing.assert_allclose(normal[1], [-1.0, 0.0, 0.0])
        np.testing.assert_allclose(normal[2], [0.6, 0.0, 0.8])
        np.testing.assert_allclose(normal[3], [0.0, 0.0, 1.0])

    def test_moving_box(self):
        blade = BladeKinematics(0.01, start_x=0.0, start_time=1e-3)
        box = AxisAlignedBox(-2e-4, 0.0, 1e-4, 2e-3, 'blade', 'blade', motion=blade)
        self.assertEqual(box.bounds_at(5e-4)[1], 0.0)
        self.assertAlmostEqual(box.bounds_at(2e-3)[1], 1e-5, delta=1e-18)
        np.testing.assert_array_equal(box.velocity_at(2e-3), [0.01, 0.0, 0.0])

    def test_single_particle_query(self):
        material = MaterialTable()
        state = ParticleState([[0.0, 0.0, 30e-6]], [10e-6], material)
        wall = HalfSpace([0.0, 0.0, 0.0], [0.0, 0.0, 1.0], 'blade')
        gap, normal, _, interaction_class = particle_wall_gap(state.particle(0), wall, 0.0)
        self.assertAlmostEqual(gap, 20e-6, delta=1e-18)
        self.assertEqual(interaction_class, 'blade')

    def test_unknown_class_rejected(self):
        with self.assertRaises(InvalidParameterError):
            HalfSpace([0, 0, 0], [0, 0, 1], 'floor')


class TestKinematics(unittest.TestCase):
    """Test blade and platform motion"""

    def test_blade_position(self):
        blade = BladeKinematics(0.01, start_x=-1e-3, start_time=0.0)
        self.assertEqual(blade_position_at(blade, 0.0), -1e-3)
        self.assertAlmostEqual(blade_position_at(blade, 0.1), 0.0, delta=1e-18)
        self.assertAlmostEqual(blade.time_to_reach(1e-3), 0.2, delta=1e-15)

    def test_blade_rejects_negative_time(self):
        blade = BladeKinematics(0.01)
        with self.assertRaises(InvalidParameterError):
            blade_position_at(blade, -1e-3)

    def test_blade_rejects_zero_velocity(self):
        with self.assertRaises(InvalidParameterError):
            BladeKinematics(0.0)

    def test_parked_blade(self):
        blade = BladeKinematics(0.01, start_x=0.0, start_time=math.inf)
        self.assertEqual(blade.position_at(1.0), 0.0)
        np.testing.assert_array_equal(blade.velocity_at(1.0), np.zeros(3))

    def test_platform_rise(self):
        platform = PlatformSchedule(dwell=1e-3)
        platform.schedule(0.5, 2e-4, 0.01)
        self.assertAlmostEqual(platform.rise_duration, 0.02, delta=1e-15)
        self.assertAlmostEqual(platform.blade_start_time, 0.521, delta=1e-12)
        self.assertEqual(platform.displacement_at(0.4)[2], 0.0)
        self.assertAlmostEqual(platform.displacement_at(0.51)[2], 1e-4, delta=1e-15)
        self.assertAlmostEqual(platform.displacement_at(1.0)[2], 2e-4, delta=1e-18)
        self.assertAlmostEqual(platform.velocity_at(0.51)[2], 0.01, delta=1e-12)
        self.assertEqual(platform.velocity_at(0.6)[2], 0.0)


class TestProcessGeometry(unittest.TestCase):
    """Test the recoating layout"""

    def setUp(self):
        self.blade = BladeKinematics(0.01)
        self.geometry = ProcessGeometry(
            bed_length=2e-3, bed_width=0.5e-3, layer_thickness=150e-6, d_min=20e-6,
            reservoir_length=1.5e-3, reservoir_depth=1e-3, blade=self.blade,
            wall_thickness=100e-6, pit_length=0.5e-3, pit_depth=0.3e-3, window_length=1e-3,
            d_max0=50e-6)

    def test_blade_gap(self):
        """Lower blade edge sits d_min / 2 above the layer height"""
        self.assertAlmostEqual(self.geometry.blade_bottom, 160e-6, delta=1e-18)
        self.assertAlmostEqual(self.blade.start_x, -1.6e-3, delta=1e-18)

    def test_window_centered(self):
        np.testing.assert_allclose(self.geometry.evaluation_window(), (0.5e-3, 1.5e-3, 0.0, 0.5e-3))

    def test_walls(self):
        walls = {wall.name: wall for wall in self.geometry.walls()}
        self.assertEqual(len(walls), 8)
        self.assertEqual(walls['blade'].interaction_class, 'blade')
        self.assertEqual(walls['substrate'].top_height(), 0.0)
        self.assertAlmostEqual(walls['separator'].top_height(), 150e-6, delta=1e-18)
        self.assertAlmostEqual(walls['platform'].top_height(), 150e-6 - 1e-3, delta=1e-18)

    def test_blade_clears_bed(self):
        g = self.geometry
        self.assertGreater(g.blade_end_x - self.blade.thickness, g.pit_left)
        self.assertAlmostEqual(g.spread_end_time(),
                               (g.blade_end_x - self.blade.start_x) / 0.01, delta=1e-12)

    def test_dispensed_volume(self):
        self.assertAlmostEqual(self.geometry.dispensed_volume(2.0), 2 * 2e-3 * 0.5e-3 * 150e-6,
                               delta=1e-24)

    def test_domain_encloses_walls(self):
        lower, upper = self.geometry.domain_bounds()
        for wall in self.geometry.walls():
            self.assertGreaterEqual(wall.x_min, lower[0])
            self.assertLessEqual(wall.x_max, upper[0])
            self.assertGreaterEqual(wall.z_min, lower[2])
            self.assertLessEqual(wall.z_max, upper[2])

    def test_classify(self):
        positions = np.array([
            [-1e-3, 1e-4, -1e-4],       # reservoir
            [1e-3, 1e-4, 50e-6],        # bed and window
            [0.2e-3, 1e-4, 50e-6],      # bed outside the window
            [2.3e-3, 1e-4, -2e-4],      # pit
            [1e-3, 1e-4, 158e-6],       # bed, sticking out of the layer
        ])
        counts = self.geometry.classify(positions, np.array([10e-6, 10e-6, 10e-6, 10e-6, 5e-6]))
        self.assertEqual(counts, {'reservoir': 1, 'bed': 3, 'window': 2, 'pit': 1,
                                  'above_layer': 1})

    def test_short_pit_rejected(self):
        with self.assertRaises(InvalidParameterError):
            ProcessGeometry(2e-3, 0.5e-3, 150e-6, 20e-6, 1.5e-3, 1e-3, BladeKinematics(0.01),
                            pit_length=0.2e-3)

    def test_zero_thickness_rejected(self):
        with self.assertRaises(InvalidParameterError):
            ProcessGeometry(2e-3, 0.5e-3, 0.0, 20e-6, 1.5e-3, 1e-3, BladeKinematics(0.01))


if __name__ == "__main__":
    unittest.main()
