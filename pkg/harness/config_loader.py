"""
Configuration Loader

Reads line-oriented key = value files into a fully resolved RecoatConfig.

Order of precedence (later wins):
1. DEFAULT_VALUES
2. preset named by `preset = <name>`
3. keys in the file
4. CLI overrides

Sweep lines (`sweep.<key> = v1, v2, ...`) are kept aside and expanded into
one concrete RecoatConfig per run.
"""

import sys
import os
import math
import hashlib
import itertools

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.recoat_defaults import DEFAULT_VALUES, PRESETS, UNHASHED_KEYS
from config.process_config import BED_SIZES
from config.metrics_config import VOXEL_DIVISOR
from config.material_config import TIMESTEP_FACTOR, CRITICAL_TIMESTEP_FACTOR
from dem.errors import ConfigError, InvalidParameterError
from dem.particles import MaterialTable, normal_stiffness_for
from geometry.process_geometry import BladeKinematics, PlatformSchedule, ProcessGeometry
from metrics.grid_spec import MetricGridSpec
from powder.size_distribution import fit_lognormal, from_log_parameters
from powder.settling import SettleCriterion

KEYWORDS = ('auto', 'same')
SWEEP_PREFIX = 'sweep.'
SWEEP_SETTINGS = ('sweep.combine', 'sweep.jobs')
# recomputed from their ratios on every load
DERIVED_KEYS = ('material.gamma', 'material.gamma_blade', 'material.gamma_wall', 'blade.velocity')


def parse_config_text(text, source='<config>'):
    """
    Parse key = value lines

    Returns:
        dict of dotted key -> raw string value (file order)
    """
    values = {}
    section = ''
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        if line.startswith('[') and line.endswith(']'):
            section = line[1:-1].strip()
            continue
        if '=' not in line:
            raise ConfigError(f"{source}:{number}", f"expected 'key = value', got '{line}'")
        key, value = (part.strip() for part in line.split('=', 1))
        if not key:
            raise ConfigError(f"{source}:{number}", "empty key")
        if section and key != 'preset':
            key = f"{section}.{key}"
        values[key] = value
    return values


def _parse_value(key, kind, raw):
    """Convert a raw string to the key's type"""
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if kind == 'float':
            value = float(text)
            if not math.isfinite(value):
                raise ValueError(text)
            return value
        if kind == 'int':
            return int(float(text)) if 'e' in text.lower() else int(text)
        if kind == 'bool':
            lowered = text.lower()
            if lowered in ('true', 'yes', '1', 'on'):
                return True
            if lowered in ('false', 'no', '0', 'off'):
                return False
            raise ValueError(text)
        if kind == 'str':
            return text
        if kind.startswith('choice:'):
            options = kind.split(':', 1)[1].split('|')
            if text not in options:
                raise ValueError(f"'{text}' not in {options}")
            return text
        if kind == 'intervals':
            intervals = []
            for item in text.split(','):
                low, high = item.split(':')
                intervals.append((float(low), float(high)))
            return intervals
    except ValueError as exc:
        raise ConfigError(key, f"cannot parse '{raw}' as {kind} ({exc})")
    raise ConfigError(key, f"unknown value type {kind}")


def _format_value(value):
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return '%.17g' % value
    if isinstance(value, list):
        return ', '.join(f"{low:g}:{high:g}" for low, high in value)
    return str(value)


class RecoatConfig:
    """Resolved experiment description"""

    def __init__(self, values, raw, sweep=None, source='<config>'):
        self.values = values
        self.raw = raw
        self.sweep = sweep or {}
        self.source = source

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        return self.values.get(key, default)

    # DERIVED OBJECTS

    def material(self):
        v = self.values
        return MaterialTable(
            rho=v['material.density'],
            gravity=(0.0, 0.0, -v['material.gravity']),
            gamma=v['material.gamma'],
            gamma_blade=v['material.gamma_blade'],
            gamma_wall=v['material.gamma_wall'],
            hamaker=v['material.hamaker'],
            k_n=v['material.k_n'],
            k_t=v['material.k_t'],
            mu=v['material.mu'],
            mu_wall=v['material.mu_wall'],
            mu_roll=v['material.mu_roll'],
            restitution=v['material.restitution'],
            cutoff_factor=v['material.cutoff_factor'],
            rolling_deadband=v['material.rolling_deadband']
        )

    def distribution(self):
        v = self.values
        return from_log_parameters(v['distribution.mu_ln'], v['distribution.sigma_ln'],
                                   v['distribution.d_min'], v['distribution.d_max'],
                                   v['distribution.d_max0'])

    def blade(self):
        v = self.values
        return BladeKinematics(v['blade.velocity'], thickness=v['blade.thickness'],
                               height=v['blade.height'], start_time=math.inf)

    def geometry(self, reservoir_depth):
        v = self.values
        return ProcessGeometry(
            bed_length=v['geometry.bed_length'],
            bed_width=v['geometry.bed_width'],
            layer_thickness=v['geometry.layer_thickness'],
            d_min=v['distribution.d_min'],
            reservoir_length=v['geometry.reservoir_length'],
            reservoir_depth=reservoir_depth,
            blade=self.blade(),
            platform=PlatformSchedule(dwell=v['platform.dwell']),
            wall_thickness=v['geometry.wall_thickness'],
            pit_length=v['geometry.pit_length'],
            pit_depth=v['geometry.pit_depth'],
            window_length=v['geometry.window_length'],
            d_max0=v['distribution.d_max0']
        )

    def metric_spec(self):
        v = self.values
        margin = 0.5 * (v['geometry.bed_length'] - v['geometry.window_length'])
        spec = MetricGridSpec(
            ray_pitch=v['metrics.ray_pitch'],
            segment_size=v['metrics.segment_size'],
            bin_size=v['metrics.bin_size'],
            voxel_size=v['metrics.voxel_size'],
            window=(margin, margin + v['geometry.window_length'], 0.0, v['geometry.bed_width']),
            period_y=v['geometry.bed_width']
        )
        return spec.validate(v['distribution.d_min'])

    def sublayers(self):
        d0 = self.values['distribution.d_max0']
        return [(low * d0, high * d0) for low, high in self.values['metrics.sublayers']]

    def settle_criterion(self):
        v = self.values
        return SettleCriterion(v['run.settle_speed'], v['run.settle_quiet_steps'],
                               v['run.settle_max_steps'])

    # SERIALIZATION

    def to_lines(self):
        """Resolved key = value lines, sorted"""
        return [f"{key} = {_format_value(self.values[key])}" for key in sorted(self.values)]

    def config_hash(self):
        """md5 over the resolved lines that affect results"""
        lines = [f"{key} = {_format_value(self.values[key])}"
                 for key in sorted(self.values) if key not in UNHASHED_KEYS]
        return hashlib.md5('\n'.join(lines).encode()).hexdigest()

    def write_resolved(self, directory=None):
        """Echo the resolved config into the output directory"""
        directory = directory or self.values['run.output_dir']
        os.makedirs(directory, exist_ok=True)
        path = os.path.join(directory, 'resolved_config.cfg')
        with open(path, 'w') as f:
            f.write(f"# resolved from {self.source}\n")
            f.write(f"# config_hash = {self.config_hash()}\n")
            f.write('\n'.join(self.to_lines()) + '\n')
        return path

    def with_overrides(self, overrides):
        """Re-resolve with extra raw values, without the sweep block"""
        raw = dict(self.raw)
        raw.update(overrides)
        return resolve_config(raw, self.source)

    # SWEEPS

    def expand_sweep(self):
        """
        One concrete config per sweep point

        Returns:
            list of (sweep point dict, RecoatConfig); a config without sweep
            keys expands to itself
        """
        if not self.sweep:
            return [({}, self)]
        keys = list(self.sweep)
        lists = [self.sweep[k] for k in keys]
        if self.values['sweep.combine'] == 'zip':
            if len({len(values) for values in lists}) != 1:
                raise ConfigError('sweep.combine', "zip needs equally long sweep lists")
            points = list(zip(*lists))
        else:
            points = list(itertools.product(*lists))
        base_dir = self.values['run.output_dir']
        runs = []
        for index, point in enumerate(points):
            overrides = dict(zip(keys, point))
            overrides['run.output_dir'] = os.path.join(base_dir, f"run_{index:03d}")
            runs.append((dict(zip(keys, point)), self.with_overrides(overrides)))
        return runs


def resolve_config(raw, source='<config>', sweep=None):
    """
    Apply defaults, resolve auto / same and validate

    Raises:
        ConfigError naming the offending key
    """
    raw = {k: v for k, v in raw.items() if k not in DERIVED_KEYS}
    sweep = dict(sweep or {})
    for key in list(raw):
        if key.startswith(SWEEP_PREFIX) and key not in SWEEP_SETTINGS:
            base = key[len(SWEEP_PREFIX):]
            if base not in DEFAULT_VALUES or base.startswith(SWEEP_PREFIX):
                raise ConfigError(key, f"cannot sweep unknown key '{base}'")
            kind = DEFAULT_VALUES[base][0]
            items = [item.strip() for item in raw.pop(key).split(',') if item.strip()]
            if not items:
                raise ConfigError(key, "empty sweep list")
            sweep[base] = [_parse_value(base, kind, item) for item in items]
    for key in raw:
        if key not in DEFAULT_VALUES:
            raise ConfigError(key, "unknown key")

    values = {}
    for key, (kind, default) in DEFAULT_VALUES.items():
        value = raw.get(key, default)
        if isinstance(value, str) and not value.strip():
            raise ConfigError(key, "missing required key (blank value)")
        if isinstance(value, str) and value.strip() in KEYWORDS:
            values[key] = value.strip()
        else:
            values[key] = _parse_value(key, kind, value)

    _resolve_derived(values)
    _validate(values)
    return RecoatConfig(values, raw, sweep, source)


def _auto(values, key, compute):
    if values[key] in KEYWORDS:
        values[key] = compute()


def _resolve_derived(values):
    """Fill every auto / same value"""
    v = values
    bed = BED_SIZES[v['geometry.scale']]
    _auto(v, 'geometry.bed_length', lambda: bed['length'])
    _auto(v, 'geometry.bed_width', lambda: bed['width'])
    _auto(v, 'geometry.window_length', lambda: bed['window_length'])
    d0 = v['distribution.d_max0']
    _auto(v, 'geometry.layer_thickness', lambda: v['geometry.layer_thickness_ratio'] * d0)
    _auto(v, 'blade.height', lambda: 30.0 * d0)
    v['blade.velocity'] = v['blade.velocity_ratio'] * v['blade.reference_velocity']
    _auto(v, 'platform.rise_velocity', lambda: v['blade.reference_velocity'])

    try:
        if v['distribution.mu_ln'] in KEYWORDS or v['distribution.sigma_ln'] in KEYWORDS:
            fitted = fit_lognormal(v['distribution.d10'], v['distribution.d50'],
                                   v['distribution.d90'], d0)
            _auto(v, 'distribution.mu_ln', lambda: fitted.mu_ln)
            _auto(v, 'distribution.sigma_ln', lambda: fitted.sigma_ln)
    except InvalidParameterError as exc:
        raise ConfigError('distribution.d10', str(exc))
    _auto(v, 'distribution.d_min', lambda: v['distribution.d10'])
    _auto(v, 'distribution.d_max', lambda: v['distribution.d90'])

    gamma_0 = v['material.gamma_0']
    _auto(v, 'material.gamma_blade_ratio', lambda: v['material.gamma_ratio'])
    _auto(v, 'material.gamma_wall_ratio', lambda: v['material.gamma_ratio'])
    v['material.gamma_blade_ratio'] *= v['material.gamma_blade_factor']
    v['material.gamma_wall_ratio'] *= v['material.gamma_wall_factor']
    v['material.gamma'] = v['material.gamma_ratio'] * gamma_0
    v['material.gamma_blade'] = v['material.gamma_blade_ratio'] * gamma_0
    v['material.gamma_wall'] = v['material.gamma_wall_ratio'] * gamma_0
    _auto(v, 'material.k_n', lambda: normal_stiffness_for(v['material.gamma'], gamma_0))
    v['material.k_n'] = v['material.k_n'] * v['material.stiffness_factor']
    _auto(v, 'material.k_t', lambda: v['material.k_n'])
    v['material.mu'] = v['material.mu'] * v['material.friction_factor']
    _auto(v, 'material.mu_wall', lambda: v['material.mu'])
    v['material.mu_wall'] *= v['material.mu_wall_factor']
    v['material.restitution'] = v['material.restitution'] * v['material.restitution_factor']
    # the factors are folded into the values above
    v['material.stiffness_factor'] = 1.0
    v['material.friction_factor'] = 1.0
    v['material.restitution_factor'] = 1.0
    v['material.gamma_blade_factor'] = 1.0
    v['material.gamma_wall_factor'] = 1.0
    v['material.mu_wall_factor'] = 1.0

    d_min = v['distribution.d_min']
    _auto(v, 'metrics.voxel_size', lambda: d_min / VOXEL_DIVISOR)
    _auto(v, 'run.skin', lambda: 0.1 * d_min)
    m_min = math.pi / 6.0 * d_min ** 3 * v['material.density']
    if v['material.k_n'] > 0 and m_min > 0:
        _auto(v, 'run.dt', lambda: TIMESTEP_FACTOR * CRITICAL_TIMESTEP_FACTOR
              * math.sqrt(m_min / v['material.k_n']))

    def pit_depth():
        dispensed = v['geometry.surplus_factor'] * v['geometry.bed_length'] \
            * v['geometry.bed_width'] * v['geometry.layer_thickness']
        return 1.5 * dispensed / (v['geometry.packing_estimate'] * v['geometry.pit_length']
                                  * v['geometry.bed_width'])
    _auto(v, 'geometry.pit_depth', pit_depth)


def _validate(values):
    """Range checks with key paths"""
    v = values
    positive = [
        'geometry.bed_length', 'geometry.bed_width', 'geometry.window_length',
        'geometry.layer_thickness', 'geometry.reservoir_length', 'geometry.wall_thickness',
        'geometry.pit_length', 'geometry.pit_depth', 'geometry.surplus_factor',
        'geometry.fill_factor', 'geometry.packing_estimate', 'blade.reference_velocity',
        'blade.velocity_ratio', 'blade.thickness', 'blade.height', 'platform.rise_velocity',
        'material.density', 'material.k_n', 'material.restitution', 'distribution.d_max0',
        'metrics.ray_pitch', 'metrics.segment_size', 'metrics.bin_size', 'metrics.voxel_size',
        'run.dt', 'run.relax_time', 'run.settle_speed', 'run.settle_quiet_steps',
        'run.settle_max_steps', 'run.threads', 'sweep.jobs', 'run.progress_every',
    ]
    for key in positive:
        if v[key] in KEYWORDS or not v[key] > 0:
            raise ConfigError(key, f"must be > 0, got {v[key]}")
    non_negative = [
        'material.gamma_ratio', 'material.gamma_blade_ratio', 'material.gamma_wall_ratio',
        'material.gamma_0', 'material.hamaker', 'material.k_t', 'material.mu',
        'material.mu_wall', 'material.mu_roll', 'material.rolling_deadband',
        'platform.dwell', 'run.skin', 'run.snapshot_every',
    ]
    for key in non_negative:
        if v[key] in KEYWORDS or v[key] < 0:
            raise ConfigError(key, f"must be >= 0, got {v[key]}")
    if v['material.restitution'] > 1.0:
        raise ConfigError('material.restitution', "must be <= 1 after the restitution factor")
    if v['geometry.window_length'] > v['geometry.bed_length']:
        raise ConfigError('geometry.window_length', "window is longer than the bed")
    if v['platform.rise_velocity'] > v['blade.reference_velocity']:
        raise ConfigError('platform.rise_velocity', "platform must rise no faster than V0")
    if not v['geometry.fill_factor'] >= 1.0:
        raise ConfigError('geometry.fill_factor', "reservoir must hold the dispensed volume")
    if not 0 < v['distribution.d_min'] < v['distribution.d_max']:
        raise ConfigError('distribution.d_min', "must satisfy 0 < d_min < d_max")
    try:
        config = RecoatConfig(v, {})
        config.material()
        config.metric_spec()
        config.settle_criterion()
        config.blade()
    except InvalidParameterError as exc:
        raise ConfigError('config', str(exc))


def load_config(path=None, overrides=None, text=None):
    """
    Load, resolve and validate a config file

    Args:
        path: config file (optional when text is given)
        overrides: dict of raw CLI overrides applied last
        text: config text instead of a file
    Returns:
        RecoatConfig
    Raises:
        ConfigError with the key path
    """
    source = path or '<text>'
    if text is None:
        if path is None:
            text = ''
        else:
            try:
                with open(path) as f:
                    text = f.read()
            except OSError as exc:
                raise ConfigError(str(path), f"cannot read config file ({exc})")
    file_values = parse_config_text(text, source)

    raw = {}
    preset = file_values.pop('preset', None)
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError('preset', f"unknown preset '{preset}' (known: {', '.join(PRESETS)})")
        raw.update(PRESETS[preset])
    raw.update(file_values)
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[key] = str(value)
    return resolve_config(raw, source)
