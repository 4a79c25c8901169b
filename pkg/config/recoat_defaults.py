"""
Recoat Configuration Defaults

Every configurable key with its type and default, plus named presets.

Keywords:
- auto: derived at load time (k_N rule, fitted distribution, d_min/8 voxels, ...)
- same: copies the paired key (gamma_blade_ratio = gamma_ratio, k_t = k_n, ...)
"""

from config.material_config import (
    GAMMA_0,
    HAMAKER_CONSTANT,
    PARTICLE_DENSITY,
    GRAVITY,
    FRICTION,
    RESTITUTION,
    ROLLING_FRICTION,
    ROLLING_DEADBAND,
    CUTOFF_FACTOR,
    GAMMA_RATIOS,
    SENSITIVITY_FACTORS,
    BLADE_ADHESION_FACTORS,
    SUBSTRATE_ADHESION_FACTORS,
    SUBSTRATE_FRICTION_FACTORS
)
from config.process_config import (
    D10, D50, D90,
    NOMINAL_MAX_DIAMETER,
    DEFAULT_LAYER_THICKNESS_RATIO,
    LAYER_THICKNESS_RATIOS,
    BLADE_VELOCITY_RATIOS,
    REFERENCE_BLADE_VELOCITY,
    BLADE_THICKNESS,
    RESERVOIR_LENGTH,
    WALL_THICKNESS,
    PIT_LENGTH,
    SURPLUS_FACTOR,
    FILL_FACTOR,
    PACKING_ESTIMATE,
    PLATFORM_DWELL,
    RELAX_TIME
)
from config.metrics_config import (
    RAY_PITCH,
    SEGMENT_SIZE,
    BIN_SIZE,
    SETTLE_SPEED_THRESHOLD,
    SETTLE_QUIET_STEPS,
    SETTLE_MAX_STEPS
)

# key -> (type, default); type is float, int, bool, str, choice:<a|b>, intervals
DEFAULT_VALUES = {
    # geometry
    'geometry.scale': ('choice:desk|full', 'desk'),
    'geometry.bed_length': ('float', 'auto'),
    'geometry.bed_width': ('float', 'auto'),
    'geometry.window_length': ('float', 'auto'),
    'geometry.layer_thickness_ratio': ('float', DEFAULT_LAYER_THICKNESS_RATIO),
    'geometry.layer_thickness': ('float', 'auto'),
    'geometry.reservoir_length': ('float', RESERVOIR_LENGTH),
    'geometry.wall_thickness': ('float', WALL_THICKNESS),
    'geometry.pit_length': ('float', PIT_LENGTH),
    'geometry.pit_depth': ('float', 'auto'),
    'geometry.surplus_factor': ('float', SURPLUS_FACTOR),
    'geometry.fill_factor': ('float', FILL_FACTOR),
    'geometry.packing_estimate': ('float', PACKING_ESTIMATE),

    # blade and platform
    'blade.reference_velocity': ('float', REFERENCE_BLADE_VELOCITY),
    'blade.velocity_ratio': ('float', 1.0),
    'blade.thickness': ('float', BLADE_THICKNESS),
    'blade.height': ('float', 'auto'),
    'platform.rise_velocity': ('float', 'auto'),
    'platform.dwell': ('float', PLATFORM_DWELL),

    # material
    'material.gamma_0': ('float', GAMMA_0),
    'material.gamma_ratio': ('float', 1.0),
    'material.gamma_blade_ratio': ('float', 'same'),
    'material.gamma_blade_factor': ('float', 1.0),
    'material.gamma_wall_ratio': ('float', 'same'),
    'material.gamma_wall_factor': ('float', 1.0),
    'material.hamaker': ('float', HAMAKER_CONSTANT),
    'material.density': ('float', PARTICLE_DENSITY),
    'material.gravity': ('float', GRAVITY),
    'material.k_n': ('float', 'auto'),
    'material.k_t': ('float', 'same'),
    'material.stiffness_factor': ('float', 1.0),
    'material.mu': ('float', FRICTION),
    'material.mu_wall': ('float', 'same'),
    'material.mu_wall_factor': ('float', 1.0),
    'material.friction_factor': ('float', 1.0),
    'material.mu_roll': ('float', ROLLING_FRICTION),
    'material.restitution': ('float', RESTITUTION),
    'material.restitution_factor': ('float', 1.0),
    'material.rolling_deadband': ('float', ROLLING_DEADBAND),
    'material.cutoff_factor': ('float', CUTOFF_FACTOR),

    # size distribution
    'distribution.d10': ('float', D10),
    'distribution.d50': ('float', D50),
    'distribution.d90': ('float', D90),
    'distribution.d_max0': ('float', NOMINAL_MAX_DIAMETER),
    'distribution.mu_ln': ('float', 'auto'),
    'distribution.sigma_ln': ('float', 'auto'),
    'distribution.d_min': ('float', 'auto'),
    'distribution.d_max': ('float', 'auto'),

    # metrics
    'metrics.ray_pitch': ('float', RAY_PITCH),
    'metrics.segment_size': ('float', SEGMENT_SIZE),
    'metrics.bin_size': ('float', BIN_SIZE),
    'metrics.voxel_size': ('float', 'auto'),
    'metrics.sublayers': ('intervals', '0:1, 1:2, 2:3'),

    # run
    'run.seed': ('int', 0),
    'run.jitter_seed': ('int', 0),
    'run.dt': ('float', 'auto'),
    'run.allow_unstable_timestep': ('bool', False),
    'run.skin': ('float', 'auto'),
    'run.mode': ('choice:deterministic|fast', 'deterministic'),
    'run.threads': ('int', 1),
    'run.output_dir': ('str', 'results/run'),
    'run.snapshot_every': ('int', 0),
    'run.relax_time': ('float', RELAX_TIME),
    'run.settle_speed': ('float', SETTLE_SPEED_THRESHOLD),
    'run.settle_quiet_steps': ('int', SETTLE_QUIET_STEPS),
    'run.settle_max_steps': ('int', SETTLE_MAX_STEPS),
    'run.progress_every': ('int', 20_000),
    'run.verbose': ('bool', True),

    # sweep
    'sweep.combine': ('choice:product|zip', 'product'),
    'sweep.jobs': ('int', 1),
}

# Keys left out of the config hash (they do not change results)
UNHASHED_KEYS = [
    'run.output_dir',
    'run.verbose',
    'run.threads',
    'run.mode',
    'run.progress_every',
    'sweep.jobs',
    'sweep.combine',
]


def sweep_list(values):
    """Comma-separated sweep value list"""
    return ', '.join(f"{v:g}" for v in values)


GAMMA_SWEEP = sweep_list(GAMMA_RATIOS)
THICKNESS_SWEEP = sweep_list(LAYER_THICKNESS_RATIOS)
VELOCITY_SWEEP = sweep_list(BLADE_VELOCITY_RATIOS)

PRESETS = {
    'paper-default': {
        'geometry.scale': 'desk',
        'material.gamma_ratio': '1',
        'geometry.layer_thickness_ratio': '3',
        'blade.velocity_ratio': '1',
    },
    'full-scale': {
        'geometry.scale': 'full',
        'material.gamma_ratio': '1',
        'geometry.layer_thickness_ratio': '3',
        'blade.velocity_ratio': '1',
    },
    'paper-sweep-gamma': {
        'geometry.scale': 'desk',
        'sweep.material.gamma_ratio': GAMMA_SWEEP,
    },
    'paper-sweep-thickness': {
        'geometry.scale': 'desk',
        'sweep.geometry.layer_thickness_ratio': THICKNESS_SWEEP,
        'sweep.material.gamma_ratio': GAMMA_SWEEP,
    },
    'paper-sweep-velocity': {
        'geometry.scale': 'desk',
        'sweep.blade.velocity_ratio': VELOCITY_SWEEP,
        'sweep.material.gamma_ratio': GAMMA_SWEEP,
    },
    # gamma_B = gamma against gamma_B = 0 over the surface-energy range
    'paper-sweep-blade': {
        'geometry.scale': 'desk',
        'sweep.material.gamma_blade_factor': sweep_list(BLADE_ADHESION_FACTORS),
        'sweep.material.gamma_ratio': GAMMA_SWEEP,
    },
    # gamma = 4 gamma_0 without blade adhesion: gamma_W x mu_W matrix
    'paper-sweep-substrate': {
        'geometry.scale': 'desk',
        'material.gamma_ratio': '4',
        'material.gamma_blade_factor': '0',
        'sweep.material.gamma_wall_factor': sweep_list(SUBSTRATE_ADHESION_FACTORS),
        'sweep.material.mu_wall_factor': sweep_list(SUBSTRATE_FRICTION_FACTORS),
    },
    # reduced substrate adhesion without blade adhesion over the surface-energy range
    'paper-sweep-substrate-gamma': {
        'geometry.scale': 'desk',
        'material.gamma_blade_factor': '0',
        'sweep.material.gamma_wall_factor': sweep_list(SUBSTRATE_ADHESION_FACTORS[1:4]),
        'sweep.material.gamma_ratio': GAMMA_SWEEP,
    },
    'paper-replicates': {
        'geometry.scale': 'desk',
        'material.gamma_ratio': '1',
        'sweep.run.seed': '1, 2, 3, 4, 5, 6, 7, 8, 9, 10',
    },
    'sensitivity': {
        'geometry.scale': 'desk',
        'material.stiffness_factor': f"{SENSITIVITY_FACTORS['stiffness']:g}",
        'material.friction_factor': f"{SENSITIVITY_FACTORS['friction']:g}",
        'material.restitution_factor': f"{SENSITIVITY_FACTORS['restitution']:g}",
        'sweep.material.gamma_ratio': GAMMA_SWEEP,
    },
}
