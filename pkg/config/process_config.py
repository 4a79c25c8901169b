"""
Process Configuration

Recoater geometry, blade and platform defaults, plus the particle
size distribution of the reference powder.
"""

# Size distribution percentiles (m)
D10 = 20.0e-6
D50 = 34.0e-6
D90 = 44.0e-6

NOMINAL_MAX_DIAMETER = 50.0e-6     # d_max,0

# Layer thickness presets in units of d_max,0
LAYER_THICKNESS_RATIOS = [1, 2, 3, 4]
DEFAULT_LAYER_THICKNESS_RATIO = 3

# Blade
REFERENCE_BLADE_VELOCITY = 0.01    # V_0 = 10 mm/s
BLADE_THICKNESS = 200.0e-6
BLADE_HEIGHT_FACTOR = 30           # blade height >= 30 * d_max,0
BLADE_VELOCITY_RATIOS = [1, 2.5, 5, 10]

# Bed geometry (desk scale and full scale)
BED_SIZES = {
    'desk': {'length': 2.0e-3, 'width': 0.5e-3, 'window_length': 1.0e-3},
    'full': {'length': 5.0e-3, 'width': 1.0e-3, 'window_length': 3.0e-3},
}

# Reservoir / dosing
RESERVOIR_LENGTH = 1.5e-3
WALL_THICKNESS = 100.0e-6
PIT_LENGTH = 0.5e-3
PIT_DEPTH = 0.3e-3
SURPLUS_FACTOR = 2.0               # dispensed solid volume / (L_x * L_y * t0)
FILL_FACTOR = 1.15                 # reservoir solid volume / dispensed solid volume
PACKING_ESTIMATE = 0.6             # used before the settled value is known
PLATFORM_DWELL = 5.0e-3            # s, pause between dosing and blade start

# Seeding lattice
LATTICE_CLEARANCE_FACTOR = 0.1     # pitch = d_max * (1 + factor)
JITTER_FRACTION = 0.1              # jitter <= 0.1 * pitch

# Post-spread relaxation
RELAX_TIME = 0.01                  # s
