"""
Snapshot and Field Files

Snapshot: one header line `# time=... count=... blade_x=...`, a column
line, then one record per particle (id x y z r vx vy vz wx wy wz) in
exponent notation with 17 significant digits, enough to restart exactly.

Field CSV: row-major matrix of a ScalarField2D (rows = x) after a header
with origin and pitch.
"""

import sys
import os
import re

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from dem.errors import SnapshotIOError
from dem.particles import ParticleState
from metrics.grid_spec import ScalarField2D

SNAPSHOT_COLUMNS = ['id', 'x', 'y', 'z', 'r', 'vx', 'vy', 'vz', 'wx', 'wy', 'wz']
HEADER_PATTERN = re.compile(
    r'#\s*time=(?P<time>\S+)\s+count=(?P<count>\d+)\s+blade_x=(?P<blade_x>\S+)')


def write_snapshot(state, path, blade_x=0.0):
    """
    Write a particle snapshot

    Raises:
        SnapshotIOError with the path on any I/O failure
    """
    header = (f"time={state.time:.17e} count={state.count:d} blade_x={float(blade_x):.17e}\n"
              + ' '.join(SNAPSHOT_COLUMNS))
    data = np.column_stack([state.ids.astype(float), state.position, state.radius,
                            state.velocity, state.omega]) if state.count else np.empty((0, 11))
    try:
        directory = os.path.dirname(str(path))
        if directory:
            os.makedirs(directory, exist_ok=True)
        np.savetxt(path, data, fmt=['%d'] + ['%.17e'] * 10, header=header, comments='# ')
    except OSError as exc:
        raise SnapshotIOError(path, f"cannot write snapshot ({exc})")
    return path


def read_snapshot(path, material):
    """
    Read a snapshot back into a ParticleState

    Returns:
        (state, header dict with time, count and blade_x)
    """
    try:
        with open(path) as f:
            first = f.readline()
    except OSError as exc:
        raise SnapshotIOError(path, f"cannot read snapshot ({exc})")
    match = HEADER_PATTERN.match(first.strip())
    if match is None:
        raise SnapshotIOError(path, "missing snapshot header line")
    header = {
        'time': float(match.group('time')),
        'count': int(match.group('count')),
        'blade_x': float(match.group('blade_x')),
    }
    if header['count'] == 0:
        state = ParticleState(np.empty((0, 3)), np.empty(0), material, time=header['time'])
        return state, header
    try:
        data = np.loadtxt(path, comments='#', ndmin=2)
    except (OSError, ValueError) as exc:
        raise SnapshotIOError(path, f"malformed snapshot ({exc})")
    if data.shape != (header['count'], len(SNAPSHOT_COLUMNS)):
        raise SnapshotIOError(path, f"expected {header['count']} records of "
                                    f"{len(SNAPSHOT_COLUMNS)} values, got {data.shape}")
    state = ParticleState(data[:, 1:4], data[:, 4], material, velocities=data[:, 5:8],
                          omegas=data[:, 8:11], ids=data[:, 0].astype(np.int64),
                          time=header['time'])
    return state, header


def write_field_csv(field, path):
    """Write a ScalarField2D matrix with an origin / pitch header"""
    header = f"origin_x={field.origin[0]:.17g} origin_y={field.origin[1]:.17g} pitch={field.pitch:.17g}"
    try:
        directory = os.path.dirname(str(path))
        if directory:
            os.makedirs(directory, exist_ok=True)
        np.savetxt(path, field.values, delimiter=',', fmt='%.17g', header=header, comments='# ')
    except OSError as exc:
        raise SnapshotIOError(path, f"cannot write field ({exc})")
    return path


def read_field_csv(path):
    """Read a field CSV written by write_field_csv"""
    try:
        with open(path) as f:
            first = f.readline()
        values = np.loadtxt(path, delimiter=',', comments='#', ndmin=2)
    except (OSError, ValueError) as exc:
        raise SnapshotIOError(path, f"cannot read field ({exc})")
    parts = dict(item.split('=') for item in first.lstrip('# ').split())
    return ScalarField2D((float(parts['origin_x']), float(parts['origin_y'])),
                         float(parts['pitch']), values)
