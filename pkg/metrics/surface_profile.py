"""
Surface Profile

Vertical rays on the fine grid report the highest sphere intersection;
a max filter over coarser segments gives the field z_int.
"""

import sys
import os

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from dem.errors import InvalidParameterError
from geometry.boundaries import with_periodic_images
from metrics.grid_spec import ScalarField2D

CHUNK_ENTRIES = 2_000_000


def _index_range(center, radius, origin, pitch, n):
    """First and last ray index whose ray center lies within the sphere footprint"""
    first = np.ceil((center - radius - origin) / pitch - 0.5).astype(np.int64)
    last = np.floor((center + radius - origin) / pitch - 0.5).astype(np.int64)
    return np.maximum(first, 0), np.minimum(last, n - 1)


def surface_profile_raw(positions, radii, spec):
    """
    Highest intersection z of each vertical ray

    Rays sit at the centers of the ray_pitch grid over the window; rays
    that miss every sphere report the substrate height.

    Returns:
        ScalarField2D with pitch ray_pitch
    """
    x0, _, y0, _ = spec.window
    pitch = spec.ray_pitch
    nx, ny = spec.shape(pitch)
    field = np.full((nx, ny), float(spec.substrate_height))
    positions, radii = with_periodic_images(positions, radii, spec.period_y)
    if len(positions):
        ix0, ix1 = _index_range(positions[:, 0], radii, x0, pitch, nx)
        iy0, iy1 = _index_range(positions[:, 1], radii, y0, pitch, ny)
        ncols = np.maximum(ix1 - ix0 + 1, 0)
        nrows = np.maximum(iy1 - iy0 + 1, 0)
        hits = ncols * nrows
        keep = np.flatnonzero(hits > 0)
        for chunk in _chunks(keep, hits):
            counts = hits[chunk]
            owner = np.repeat(chunk, counts)
            local = np.arange(int(counts.sum())) - np.repeat(np.cumsum(counts) - counts, counts)
            ix = ix0[owner] + local // nrows[owner]
            iy = iy0[owner] + local % nrows[owner]
            dx = x0 + (ix + 0.5) * pitch - positions[owner, 0]
            dy = y0 + (iy + 0.5) * pitch - positions[owner, 1]
            rest = radii[owner] ** 2 - dx * dx - dy * dy
            inside = rest >= 0.0
            top = positions[owner[inside], 2] + np.sqrt(rest[inside])
            np.maximum.at(field, (ix[inside], iy[inside]), top)
    return ScalarField2D((x0, y0), pitch, field)


def _chunks(indices, sizes):
    """Split particle indices so each chunk expands to a bounded entry count"""
    if len(indices) == 0:
        return
    totals = np.cumsum(sizes[indices])
    start = 0
    while start < len(indices):
        base = totals[start - 1] if start > 0 else 0
        stop = int(np.searchsorted(totals, base + CHUNK_ENTRIES, side='right'))
        stop = max(stop, start + 1)
        yield indices[start:stop]
        start = stop


def surface_profile_filtered(raw, spec):
    """
    Max filter of the raw profile over segment_size cells

    Returns:
        ScalarField2D z_int with pitch segment_size
    """
    factor = int(round(spec.segment_size / raw.pitch))
    nx, ny = raw.values.shape
    if factor < 1 or nx % factor or ny % factor:
        raise InvalidParameterError("segment_size must tile the raw profile grid")
    blocks = raw.values.reshape(nx // factor, factor, ny // factor, factor)
    return ScalarField2D(raw.origin, raw.pitch * factor, blocks.max(axis=(1, 3)))
