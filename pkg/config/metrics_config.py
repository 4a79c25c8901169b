"""
Metrics Configuration

Grid resolutions for surface-profile and packing-fraction evaluation,
and the settle criterion.
"""

RAY_PITCH = 5.0e-6                 # Delta_SR
SEGMENT_SIZE = 25.0e-6             # Delta_SR,int
BIN_SIZE = 100.0e-6                # Delta_PF, about one laser spot
VOXEL_DIVISOR = 8                  # Delta_V = d_min / 8

# Sub-layers in units of d_max,0
SUBLAYER_INTERVALS = [(0, 1), (1, 2), (2, 3)]

# Settling
SETTLE_SPEED_THRESHOLD = 1.0e-4    # m/s
SETTLE_QUIET_STEPS = 500
SETTLE_MAX_STEPS = 5_000_000

# Net-force tolerance for settled particles (fraction of own weight)
SETTLED_FORCE_TOLERANCE = 1.0e-3

# Adhesion-to-gravity ratios of two contacting mean-size particles,
# keyed by gamma / gamma_0 (reference values for the analyze command)
REFERENCE_FORCE_RATIOS = {
    0.0: 0.0,
    0.25: 3.25,
    1.0: 13.0,
    4.0: 52.0,
}
FORCE_RATIO_TOLERANCE = 0.15
