"""
Unit Tests for Layer Metrics

Tests the surface profile, voxel packing fraction, layer report and
adhesion-to-gravity ratio on analytic sphere arrangements
"""

import sys
import os
import math
import unittest

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from dem.errors import InvalidParameterError
from metrics.grid_spec import MetricGridSpec, field_stats
from metrics.surface_profile import (
    surface_profile_raw,
    surface_profile_filtered
)
from metrics.packing_fraction import (
    solid_volume_in_box,
    packing_fraction_field,
    packing_fraction_fields,
    sublayer_packing
)
from metrics.layer_report import evaluate_layer
from metrics.force_ratio import force_ratio, force_ratio_table, equivalent_diameter

UM = 1e-6


def cubic_lattice(pitch, x_cells, y_cells, z_cells, shift=0.0):
    index = np.stack(np.meshgrid(np.arange(*x_cells), np.arange(*y_cells), np.arange(*z_cells),
                                 indexing='ij'), axis=-1).reshape(-1, 3)
    return (index + 0.5) * pitch + shift


class TestGridSpec(unittest.TestCase):
    """Test resolution checks"""

    def test_default_voxel(self):
        spec = MetricGridSpec(window=(0.0, 1e-3, 0.0, 0.5e-3)).validate(20 * UM)
        self.assertAlmostEqual(spec.voxel_size, 2.5 * UM, delta=1e-18)
        self.assertEqual(spec.shape(spec.bin_size), (10, 5))

    def test_rejects_untiled_window(self):
        with self.assertRaises(InvalidParameterError):
            MetricGridSpec(window=(0.0, 1.05e-3, 0.0, 0.5e-3)).validate(20 * UM)

    def test_rejects_coarse_voxel(self):
        with self.assertRaises(InvalidParameterError):
            MetricGridSpec(voxel_size=5 * UM).validate(20 * UM)

    def test_field_stats(self):
        mean, std = field_stats(np.array([[1.0, 3.0]]))
        self.assertEqual((mean, std), (2.0, 1.0))


class TestSingleSphere(unittest.TestCase):
    """One d = 40 um sphere inside a 100 x 100 um window"""

    def setUp(self):
        self.spec = MetricGridSpec(ray_pitch=5 * UM, segment_size=25 * UM, bin_size=100 * UM,
                                   voxel_size=2.5 * UM, window=(0.0, 100 * UM, 0.0, 100 * UM))
        self.positions = np.array([[50.75 * UM, 50.75 * UM, 60.75 * UM]])
        self.radii = np.array([20 * UM])

    def test_raw_profile_peak(self):
        raw = surface_profile_raw(self.positions, self.radii, self.spec)
        self.assertEqual(raw.shape, (20, 20))
        expected = 60.75 * UM + math.sqrt((20 * UM) ** 2 - 2 * (1.75 * UM) ** 2)
        self.assertAlmostEqual(raw.values.max(), expected, delta=1e-15)
        self.assertEqual(raw.values[0, 0], 0.0)

    def test_filtered_profile(self):
        raw = surface_profile_raw(self.positions, self.radii, self.spec)
        z_int = surface_profile_filtered(raw, self.spec)
        self.assertEqual(z_int.shape, (4, 4))
        self.assertEqual(z_int.values[2, 2], raw.values.max())
        self.assertEqual(z_int.values[0, 0], 0.0)
        self.assertEqual(int(np.count_nonzero(z_int.values)), 4)

    def test_packing_fraction(self):
        """Phi = V / (h A) for h = 150 um"""
        phi = packing_fraction_field(self.positions, self.radii, self.spec, 150 * UM)
        exact = math.pi / 6 * (40 * UM) ** 3 / (150 * UM * (100 * UM) ** 2)
        self.assertEqual(phi.shape, (1, 1))
        self.assertAlmostEqual(phi.values[0, 0] / exact, 1.0, delta=0.03)

    def test_fields_share_numerator(self):
        """Phi_t * t equals Phi_t0 * t0 when both count the same solid"""
        phi_t0, phi_t = packing_fraction_fields(self.positions, self.radii, self.spec,
                                                [150 * UM, 75 * UM], 150 * UM)
        single = packing_fraction_field(self.positions, self.radii, self.spec, 150 * UM)
        np.testing.assert_array_equal(phi_t0.values, single.values)
        np.testing.assert_allclose(phi_t.values * 75 * UM, phi_t0.values * 150 * UM, rtol=1e-12)
        with self.assertRaises(InvalidParameterError):
            packing_fraction_fields(self.positions, self.radii, self.spec, [150 * UM, 0.0],
                                    150 * UM)

    def test_voxel_refinement_converges(self):
        """Halving the voxel reduces the average volume error"""
        rng = np.random.default_rng(21)
        exact = math.pi / 6 * (40 * UM) ** 3
        lower = np.zeros(3)
        upper = np.full(3, 100 * UM)
        errors = {2.5 * UM: [], 1.25 * UM: []}
        for _ in range(40):
            center = rng.uniform(30 * UM, 70 * UM, size=(1, 3))
            for voxel in errors:
                volume = solid_volume_in_box(center, self.radii, lower, upper, voxel)
                errors[voxel].append(abs(volume - exact) / exact)
        self.assertLess(np.mean(errors[1.25 * UM]), 0.75 * np.mean(errors[2.5 * UM]))

    def test_rejects_zero_height(self):
        with self.assertRaises(InvalidParameterError):
            packing_fraction_field(self.positions, self.radii, self.spec, 0.0)

    def test_rejects_bad_sublayer(self):
        with self.assertRaises(InvalidParameterError):
            sublayer_packing(self.positions, self.radii, self.spec, (40 * UM, 20 * UM))


class TestCubicLattice(unittest.TestCase):
    """Simple cubic packing has Phi = pi / 6"""

    def test_shifted_lattice(self):
        """A lattice extending past the window and below the substrate"""
        spec = MetricGridSpec(ray_pitch=5 * UM, segment_size=20 * UM, bin_size=120 * UM,
                              voxel_size=2.5 * UM, window=(0.0, 120 * UM, 0.0, 120 * UM))
        positions = cubic_lattice(40 * UM, (-1, 4), (-1, 4), (-1, 4), shift=0.75 * UM)
        radii = np.full(len(positions), 20 * UM)
        phi = packing_fraction_field(positions, radii, spec, 120 * UM)
        self.assertAlmostEqual(phi.values[0, 0], math.pi / 6, delta=0.015)

    def test_periodic_images_counted(self):
        """Spheres cut by the y boundary contribute through their images"""
        spec = MetricGridSpec(ray_pitch=5 * UM, segment_size=20 * UM, bin_size=120 * UM,
                              voxel_size=2.5 * UM, window=(0.0, 120 * UM, 0.0, 120 * UM),
                              period_y=120 * UM)
        positions = cubic_lattice(40 * UM, (0, 3), (0, 3), (0, 3), shift=0.75 * UM)
        positions[:, 1] = np.mod(positions[:, 1] + 20 * UM, 120 * UM)
        radii = np.full(len(positions), 20 * UM)
        phi = packing_fraction_field(positions, radii, spec, 120 * UM)
        self.assertAlmostEqual(phi.values[0, 0], math.pi / 6, delta=0.015)


class TestLayerReport(unittest.TestCase):
    """Three full layers of d = 40 um spheres on a 120 x 120 um window"""

    def setUp(self):
        self.spec = MetricGridSpec(ray_pitch=5 * UM, segment_size=20 * UM, bin_size=120 * UM,
                                   voxel_size=2.5 * UM,
                                   window=(0.0, 120 * UM, 0.0, 120 * UM)).validate(40 * UM)
        self.positions = cubic_lattice(40 * UM, (0, 3), (0, 3), (0, 3))
        self.radii = np.full(len(self.positions), 20 * UM)

    def test_flat_surface(self):
        report, fields = evaluate_layer(self.positions, self.radii, self.spec, 120 * UM, 40 * UM)
        top = 100 * UM + math.sqrt((20 * UM) ** 2 - 2 * (2.5 * UM) ** 2)
        self.assertAlmostEqual(report.mean_height, top, delta=1e-15)
        self.assertAlmostEqual(report.std_height, 0.0, delta=1e-15)
        self.assertAlmostEqual(report.relative_height, top / (120 * UM), places=12)
        self.assertEqual(fields['z_int'].shape, (6, 6))

    def test_shared_numerator(self):
        """Phi_t * t equals Phi_t0 * t0"""
        report, fields = evaluate_layer(self.positions, self.radii, self.spec, 120 * UM, 40 * UM)
        self.assertAlmostEqual(report.mean_packing_t0, math.pi / 6, delta=0.03)
        self.assertAlmostEqual(report.mean_packing * report.mean_height,
                               report.mean_packing_t0 * 120 * UM, delta=1e-18)
        np.testing.assert_allclose(fields['phi_t'].values * report.mean_height,
                                   fields['phi_t0'].values * 120 * UM, rtol=1e-12)

    def test_sublayers(self):
        report, _ = evaluate_layer(self.positions, self.radii, self.spec, 120 * UM, 40 * UM)
        self.assertEqual(len(report.sublayers), 3)
        for z_low, z_high, phi in report.sublayers:
            self.assertAlmostEqual(z_high - z_low, 40 * UM, delta=1e-18)
            self.assertAlmostEqual(phi, math.pi / 6, delta=0.03)
        row = report.to_row()
        self.assertIn('sublayer_0_1', row)
        self.assertIn('sublayer_2_3', row)
        self.assertEqual(row['relative_roughness'], report.std_height / (40 * UM))

    def test_ignores_particles_outside_window(self):
        far = np.vstack([self.positions, [[500 * UM, 60 * UM, 60 * UM]]])
        report, _ = evaluate_layer(far, np.full(len(far), 20 * UM), self.spec, 120 * UM, 40 * UM)
        reference, _ = evaluate_layer(self.positions, self.radii, self.spec, 120 * UM, 40 * UM)
        self.assertEqual(report.to_row(), reference.to_row())

    def test_empty_layer(self):
        report, _ = evaluate_layer(np.empty((0, 3)), np.empty(0), self.spec, 120 * UM, 40 * UM)
        self.assertEqual(report.mean_height, 0.0)
        self.assertEqual(report.mean_packing, 0.0)
        self.assertEqual(report.mean_packing_t0, 0.0)


class TestForceRatio(unittest.TestCase):
    """Test the adhesion-to-gravity ratio"""

    def test_reference_diameter(self):
        self.assertAlmostEqual(force_ratio(1e-4, 34 * UM), 11.94, delta=0.01)

    def test_linear_in_surface_energy(self):
        self.assertAlmostEqual(force_ratio(4e-4, 34 * UM) / force_ratio(1e-4, 34 * UM), 4.0,
                               places=12)
        self.assertEqual(force_ratio(0.0, 34 * UM), 0.0)

    def test_inverse_square_in_diameter(self):
        self.assertAlmostEqual(force_ratio(1e-4, 17 * UM) / force_ratio(1e-4, 34 * UM), 4.0,
                               places=12)

    def test_equivalent_diameter(self):
        d = equivalent_diameter(4e-4, 34 * UM)
        self.assertAlmostEqual(d, 17 * UM, delta=1e-18)
        self.assertAlmostEqual(force_ratio(1e-4, d), force_ratio(4e-4, 34 * UM), places=9)
        self.assertTrue(math.isinf(equivalent_diameter(0.0, 34 * UM)))

    def test_table_within_tolerance(self):
        rows = force_ratio_table(34 * UM)
        self.assertEqual([row['gamma_ratio'] for row in rows], [0.0, 0.25, 1.0, 4.0])
        for row in rows:
            self.assertTrue(row['within_tolerance'])

    def test_rejects_zero_diameter(self):
        with self.assertRaises(InvalidParameterError):
            force_ratio(1e-4, 0.0)


if __name__ == "__main__":
    unittest.main()
