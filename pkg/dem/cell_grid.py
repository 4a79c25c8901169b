"""
Cell Grid Broadphase

Linked-cell neighbor search with a periodic y axis:
- particles are binned into cubic-ish cells of edge >= d_max + g_cut
- candidate pairs come from the 27-cell neighborhood
- a Verlet skin avoids rebuilding the pair list every step
"""

import sys
import os
import math

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from dem.errors import InvalidParameterError, OutOfDomainError
from geometry.boundaries import minimum_image

NEIGHBOR_OFFSETS = [(dx, dy, dz) for dx in (-1, 0, 1) for dy in (-1, 0, 1) for dz in (-1, 0, 1)]


class CellGrid:
    """Uniform cell binning of the simulation box"""

    def __init__(self, lower, upper, edge, periodic_y=True):
        self.lower = np.asarray(lower, dtype=float).reshape(3)
        self.upper = np.asarray(upper, dtype=float).reshape(3)
        if not edge > 0:
            raise InvalidParameterError(f"cell edge must be > 0, got {edge}")
        if np.any(self.upper <= self.lower):
            raise InvalidParameterError("grid upper corner must exceed lower corner")
        self.edge = float(edge)
        self.periodic_y = periodic_y
        span = self.upper - self.lower
        self.extents = np.maximum(1, np.floor(span / self.edge)).astype(np.int64)
        self.cell_size = span / self.extents
        self.L_y = float(span[1])

    @classmethod
    def for_particles(cls, lower, upper, d_max, g_cut, skin=0.0, periodic_y=True):
        """Grid whose edge satisfies edge >= d_max + g_cut (+ skin)"""
        return cls(lower, upper, d_max + g_cut + skin, periodic_y)

    @property
    def cell_count(self):
        return int(np.prod(self.extents))

    def cell_coordinates(self, positions, ids=None):
        """
        Integer cell coordinates of every particle

        Raises:
            OutOfDomainError if a center lies outside the box in x or z
            (or y when not periodic)
        """
        positions = np.asarray(positions, dtype=float)
        checked_axes = [0, 2] if self.periodic_y else [0, 1, 2]
        outside = np.zeros(len(positions), dtype=bool)
        for axis in checked_axes:
            outside |= (positions[:, axis] < self.lower[axis]) | (positions[:, axis] > self.upper[axis])
        outside |= ~np.all(np.isfinite(positions), axis=1)
        if np.any(outside):
            k = int(np.flatnonzero(outside)[0])
            particle_id = ids[k] if ids is not None else k
            raise OutOfDomainError(particle_id, positions[k])

        rel = (positions - self.lower) / self.cell_size
        coords = np.floor(rel).astype(np.int64)
        if self.periodic_y:
            coords[:, 1] = np.mod(coords[:, 1], self.extents[1])
        return np.minimum(np.maximum(coords, 0), self.extents - 1)

    def linear_index(self, coords):
        nx, ny, nz = self.extents
        return (coords[:, 0] * ny + coords[:, 1]) * nz + coords[:, 2]

    def candidate_pairs(self, positions, radii, reach, ids=None):
        """
        All pairs (i < j) whose surface gap is below reach

        Returns:
            (i, j) int64 arrays sorted by i * n + j
        """
        positions = np.asarray(positions, dtype=float)
        radii = np.asarray(radii, dtype=float)
        n = len(positions)
        empty = (np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))
        if n < 2:
            if n == 1:
                self.cell_coordinates(positions, ids)
            return empty

        coords = self.cell_coordinates(positions, ids)
        cells = self.linear_index(coords)
        order = np.argsort(cells, kind='stable')
        sorted_cells = cells[order]
        particles = np.arange(n, dtype=np.int64)
        nx, ny, nz = self.extents

        firsts, seconds = [], []
        for dx, dy, dz in NEIGHBOR_OFFSETS:
            ncx = coords[:, 0] + dx
            ncy = coords[:, 1] + dy
            ncz = coords[:, 2] + dz
            valid = (ncx >= 0) & (ncx < nx) & (ncz >= 0) & (ncz < nz)
            if self.periodic_y:
                ncy = np.mod(ncy, ny)
            else:
                valid &= (ncy >= 0) & (ncy < ny)
            neighbor = (ncx * ny + ncy) * nz + ncz
            start = np.searchsorted(sorted_cells, neighbor, side='left')
            stop = np.searchsorted(sorted_cells, neighbor, side='right')
            counts = np.where(valid, stop - start, 0)
            total = int(counts.sum())
            if total == 0:
                continue
            first = np.repeat(particles, counts)
            offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
            second = order[np.repeat(start, counts) + offsets]
            keep = first < second
            firsts.append(first[keep])
            seconds.append(second[keep])

        if not firsts:
            return empty
        keys = np.unique(np.concatenate(firsts) * n + np.concatenate(seconds))
        i = keys // n
        j = keys % n

        delta = positions[i] - positions[j]
        if self.periodic_y:
            delta[:, 1] = minimum_image(delta[:, 1], self.L_y)
        distance = np.sqrt(np.einsum('ij,ij->i', delta, delta))
        close = distance - radii[i] - radii[j] < reach
        return i[close], j[close]


def broadphase_pairs(state, grid, reach=None):
    """
    Candidate interacting pairs of a particle state

    Args:
        state: ParticleState
        grid: CellGrid
        reach: gap below which a pair is kept (default: the grid's slack
               edge - 2 r_max, i.e. everything the cell size guarantees)
    Returns:
        (i, j) index arrays, i < j, no duplicates
    """
    if reach is None:
        reach = grid.edge - 2.0 * float(state.radius.max()) if state.count else 0.0
    return grid.candidate_pairs(state.position, state.radius, reach, state.ids)


class NeighborList:
    """Verlet list on top of the cell grid"""

    def __init__(self, grid, cutoff, skin):
        if skin < 0:
            raise InvalidParameterError(f"skin must be >= 0, got {skin}")
        self.grid = grid
        self.cutoff = float(cutoff)
        self.skin = float(skin)
        self.reference = None
        self.i = np.empty(0, dtype=np.int64)
        self.j = np.empty(0, dtype=np.int64)
        self.build_count = 0

    def needs_update(self, positions):
        """True once any particle moved more than half the skin since the last build"""
        if self.reference is None or self.reference.shape != positions.shape:
            return True
        if self.skin == 0.0:
            return True
        delta = positions - self.reference
        if self.grid.periodic_y:
            delta[:, 1] = minimum_image(delta[:, 1], self.grid.L_y)
        max_sq = float(np.max(np.einsum('ij,ij->i', delta, delta))) if len(delta) else 0.0
        return math.sqrt(max_sq) > 0.5 * self.skin

    def pairs(self, positions, radii, ids=None):
        """Current candidate list, rebuilt when needed"""
        if self.needs_update(positions):
            self.i, self.j = self.grid.candidate_pairs(
                positions, radii, self.cutoff + self.skin, ids)
            self.reference = np.array(positions, dtype=float)
            self.build_count += 1
        else:
            # still catch particles leaving the box between rebuilds
            self.grid.cell_coordinates(positions, ids)
        return self.i, self.j
