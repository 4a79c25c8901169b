"""
Voxel Packing Fraction

Solid volume is integrated with cubic voxels: a voxel counts when its
center lies inside any sphere, inside the evaluated footprint and inside
the evaluated height range.
"""

import sys
import os
import math

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from dem.errors import InvalidParameterError
from geometry.boundaries import with_periodic_images
from metrics.grid_spec import ScalarField2D

CHUNK_ENTRIES = 4_000_000


def _voxel_count(low, high, voxel):
    """Voxels whose centers low + (k + 0.5) voxel lie below high"""
    return max(0, int(math.ceil((high - low) / voxel - 0.5 - 1e-9)))


def voxel_columns(positions, radii, x_range, y_range, z_range, voxel, period_y=None):
    """
    Occupied voxel count per (x, y) voxel column

    Returns:
        int array (n_x, n_y); multiply by voxel**3 for volume
    """
    shape = (_voxel_count(x_range[0], x_range[1], voxel),
             _voxel_count(y_range[0], y_range[1], voxel),
             _voxel_count(z_range[0], z_range[1], voxel))
    if min(shape) == 0:
        return np.zeros(shape[:2], dtype=np.int64)
    lower = np.array([x_range[0], y_range[0], z_range[0]])
    occupied = np.zeros(shape, dtype=bool)
    positions, radii = with_periodic_images(positions, radii, period_y)
    if len(positions) == 0:
        return np.zeros(shape[:2], dtype=np.int64)

    upper_index = np.array(shape) - 1
    first = np.ceil((positions - radii[:, None] - lower) / voxel - 0.5).astype(np.int64)
    last = np.floor((positions + radii[:, None] - lower) / voxel - 0.5).astype(np.int64)
    first = np.maximum(first, 0)
    last = np.minimum(last, upper_index)
    extent = np.maximum(last - first + 1, 0)
    sizes = extent.prod(axis=1)
    candidates = np.flatnonzero(sizes > 0)

    totals = np.cumsum(sizes[candidates])
    start = 0
    while start < len(candidates):
        base = totals[start - 1] if start > 0 else 0
        stop = max(int(np.searchsorted(totals, base + CHUNK_ENTRIES, side='right')), start + 1)
        chunk = candidates[start:stop]
        start = stop

        counts = sizes[chunk]
        owner = np.repeat(chunk, counts)
        local = np.arange(int(counts.sum())) - np.repeat(np.cumsum(counts) - counts, counts)
        ny_local = extent[owner, 1]
        nz_local = extent[owner, 2]
        ix = first[owner, 0] + local // (ny_local * nz_local)
        iy = first[owner, 1] + (local // nz_local) % ny_local
        iz = first[owner, 2] + local % nz_local
        dx = lower[0] + (ix + 0.5) * voxel - positions[owner, 0]
        dy = lower[1] + (iy + 0.5) * voxel - positions[owner, 1]
        dz = lower[2] + (iz + 0.5) * voxel - positions[owner, 2]
        inside = dx * dx + dy * dy + dz * dz <= radii[owner] ** 2
        occupied[ix[inside], iy[inside], iz[inside]] = True
    return occupied.sum(axis=2)


def solid_volume_in_box(positions, radii, lower, upper, voxel, period_y=None):
    """Voxel solid volume inside an axis-aligned box [m^3]"""
    columns = voxel_columns(positions, radii, (lower[0], upper[0]), (lower[1], upper[1]),
                            (lower[2], upper[2]), voxel, period_y)
    return float(columns.sum()) * voxel ** 3


def binned_solid_volume(positions, radii, spec, z_low, z_high):
    """
    Solid volume per packing-fraction bin between z_low and z_high

    Returns:
        array (n_bx, n_by) [m^3]
    """
    x0, x1, y0, y1 = spec.window
    voxel = spec.voxel_size
    columns = voxel_columns(positions, radii, (x0, x1), (y0, y1), (z_low, z_high),
                            voxel, spec.period_y)
    n_bx, n_by = spec.shape(spec.bin_size)
    bx = np.minimum(((np.arange(columns.shape[0]) + 0.5) * voxel / spec.bin_size).astype(np.int64),
                    n_bx - 1)
    by = np.minimum(((np.arange(columns.shape[1]) + 0.5) * voxel / spec.bin_size).astype(np.int64),
                    n_by - 1)
    keys = bx[:, None] * n_by + by[None, :]
    counts = np.bincount(keys.ravel(), weights=columns.ravel(), minlength=n_bx * n_by)
    return counts.reshape(n_bx, n_by) * voxel ** 3


def packing_fraction_fields(positions, radii, spec, heights, count_height):
    """
    Packing fraction per bin for several reference heights

    All fields share one numerator, the solid volume counted between the
    substrate and count_height.

    Returns:
        list of ScalarField2D with pitch bin_size, one per height
    """
    for height in heights:
        if not height > 0:
            raise InvalidParameterError(f"reference height must be > 0, got {height}")
    volume = binned_solid_volume(positions, radii, spec, spec.substrate_height, count_height)
    x0, _, y0, _ = spec.window
    return [ScalarField2D((x0, y0), spec.bin_size, volume / (height * spec.bin_size ** 2))
            for height in heights]


def packing_fraction_field(positions, radii, spec, height, count_height=None):
    """
    Packing fraction per bin, Phi = V_p / (height * bin_size^2)

    Args:
        height: reference height h (t or t0) [m]
        count_height: voxels are counted below this height (default h)
    Returns:
        ScalarField2D with pitch bin_size
    """
    top = height if count_height is None else count_height
    return packing_fraction_fields(positions, radii, spec, [height], top)[0]


def sublayer_packing(positions, radii, spec, z_interval):
    """
    Mean packing fraction of a horizontal slab over the window

    Raises:
        InvalidParameterError for an empty or negative interval
    """
    z_low, z_high = z_interval
    if z_low < 0 or not z_high > z_low:
        raise InvalidParameterError(f"invalid sub-layer interval {z_interval}")
    x0, x1, y0, y1 = spec.window
    columns = voxel_columns(positions, radii, (x0, x1), (y0, y1), (z_low, z_high),
                            spec.voxel_size, spec.period_y)
    return float(columns.sum()) * spec.voxel_size ** 3 / (spec.window_area * (z_high - z_low))
