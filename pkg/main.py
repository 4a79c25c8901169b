"""
Powder Recoating Simulator - Main Entry Point

Subcommands:
    run       one config through fill, settle, dose, spread, relax, evaluate
    sweep     every point of a config's sweep block, aggregated into one CSV
    metrics   layer metrics of a snapshot file
    analyze   adhesion-to-gravity ratios and the critical time step

Exit codes: 0 success, 1 config error, 2 runtime abort, 3 partial sweep failure
"""

import sys
import os
import argparse

# Add project to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import pandas as pd

from config.material_config import CRITICAL_TIMESTEP_FACTOR
from config.run_log_config import EXIT_CODES
from dem.contact_laws import critical_timestep
from dem.errors import ConfigError, RecoatError
from harness.config_loader import load_config
from harness.recoat_runner import run_recoat
from harness.snapshot_io import read_snapshot, write_field_csv
from harness.sweep_runner import run_sweep
from metrics.force_ratio import force_ratio_table
from metrics.layer_report import evaluate_layer
from database.db_manager import RunRecordStore

DEFAULT_DB = os.path.join('results', 'runs.db')


def build_parser():
    parser = argparse.ArgumentParser(description="DEM simulation of cohesive powder recoating")
    subparsers = parser.add_subparsers(dest='command', required=True)

    def common(sub):
        sub.add_argument('--config', help="key = value config file (may name a preset)")
        sub.add_argument('--preset', help="preset name when no config file is given")
        sub.add_argument('--out', help="output directory (run.output_dir)")
        sub.add_argument('--seed', type=int, help="size-distribution seed (run.seed)")
        sub.add_argument('--threads', type=int, help="force threads (run.threads)")
        sub.add_argument('--deterministic', action='store_true',
                         help="force the deterministic reduction order")
        sub.add_argument('--set', action='append', default=[], metavar='KEY=VALUE',
                         help="override any config key (repeatable)")
        sub.add_argument('--quiet', action='store_true', help="no progress output")

    run = subparsers.add_parser('run', help="execute a single config")
    common(run)
    run.add_argument('--db', default=DEFAULT_DB, help="run database path")

    sweep = subparsers.add_parser('sweep', help="execute a sweep config")
    common(sweep)
    sweep.add_argument('--jobs', type=int, help="parallel runs (sweep.jobs)")
    sweep.add_argument('--db', default=DEFAULT_DB, help="run database path")
    sweep.add_argument('--reuse-cached', action='store_true',
                       help="skip points whose config hash already completed")

    metrics = subparsers.add_parser('metrics', help="layer metrics of a snapshot")
    common(metrics)
    metrics.add_argument('--snapshot', required=True, help="snapshot file")

    analyze = subparsers.add_parser('analyze', help="force ratios and time step")
    common(analyze)
    analyze.add_argument('--diameter', type=float,
                         help="particle diameter for the ratio table [m] (default: mean)")
    return parser


def config_from_args(args):
    """Load the config with CLI overrides applied last"""
    overrides = {
        'run.output_dir': args.out,
        'run.seed': args.seed,
        'run.threads': args.threads,
    }
    if args.deterministic:
        overrides['run.mode'] = 'deterministic'
    if args.quiet:
        overrides['run.verbose'] = 'false'
    if getattr(args, 'jobs', None):
        overrides['sweep.jobs'] = args.jobs
    for item in args.set:
        if '=' not in item:
            raise ConfigError(item, "expected KEY=VALUE")
        key, value = (part.strip() for part in item.split('=', 1))
        overrides[key] = value
    text = None
    if args.config is None:
        text = f"preset = {args.preset or 'paper-default'}"
    return load_config(args.config, overrides, text=text)


def command_run(args, config):
    if config.sweep:
        raise ConfigError('sweep', "config has a sweep block, use the sweep subcommand")
    record = run_recoat(config)
    store = RunRecordStore(args.db)
    store.initialize_database()
    run_id = store.save_record(record)
    store.close()
    report = record['layer_report']
    print("\n" + "=" * 70)
    print(f"RUN #{run_id} COMPLETE")
    print("=" * 70)
    for key, value in report.items():
        print(f"  {key}: {value:.6g}")
    if record['nonconverged']:
        print(f"\n⚠️ Settle did not converge in: {', '.join(record['nonconverged'])}")
    return EXIT_CODES['success']


def command_sweep(args, config):
    store = RunRecordStore(args.db)
    store.initialize_database()
    records, _ = run_sweep(config, store=store, reuse_cached=args.reuse_cached)
    store.close()
    if any(r['status'] != 'completed' for r in records):
        return EXIT_CODES['partial_sweep_failure']
    return EXIT_CODES['success']


def command_metrics(args, config):
    state, header = read_snapshot(args.snapshot, config.material())
    report, fields = evaluate_layer(state.position, state.radius, config.metric_spec(),
                                    config['geometry.layer_thickness'],
                                    config['distribution.d_max0'], config.sublayers())
    print("=" * 70)
    print(f"LAYER METRICS: {args.snapshot} (t = {header['time']:.6f} s, {header['count']} particles)")
    print("=" * 70)
    row = report.to_row()
    for key, value in row.items():
        print(f"  {key}: {value:.6g}")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        pd.DataFrame([row]).to_csv(os.path.join(args.out, 'layer_report.csv'), index=False,
                                   float_format='%.17g')
        for name, field in fields.items():
            write_field_csv(field, os.path.join(args.out, 'fields', f"{name}.csv"))
        print(f"\n✅ Metrics written to {args.out}")
    return EXIT_CODES['success']


def command_analyze(args, config):
    material = config.material()
    dist = config.distribution()
    diameter = args.diameter or dist.mean_diameter
    rows = force_ratio_table(diameter, gamma_0=config['material.gamma_0'], rho=material.rho,
                             gravity=config['material.gravity'])
    frame = pd.DataFrame(rows)
    frame['equivalent_diameter_um'] = frame['equivalent_diameter'] * 1e6

    print("=" * 70)
    print(f"ADHESION-TO-GRAVITY RATIO (d = {diameter * 1e6:.2f} um)")
    print("=" * 70)
    print(frame[['gamma_ratio', 'force_ratio', 'reference', 'within_tolerance',
                 'equivalent_diameter_um']].to_string(index=False))

    m_min = material.particle_mass(dist.d_min / 2.0)
    dt_crit = critical_timestep(material, float(m_min))
    print("\n" + "=" * 70)
    print("TIME STEP")
    print("=" * 70)
    print(f"  d_min = {dist.d_min * 1e6:.2f} um, k_N = {material.k_n:g} N/m")
    print(f"  critical step {CRITICAL_TIMESTEP_FACTOR:g} sqrt(m_min/k_N) = {dt_crit:.6e} s")
    print(f"  configured run.dt = {config['run.dt']:.6e} s")
    return EXIT_CODES['success']


COMMANDS = {
    'run': command_run,
    'sweep': command_sweep,
    'metrics': command_metrics,
    'analyze': command_analyze,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        return COMMANDS[args.command](args, config)
    except ConfigError as exc:
        print(f"❌ Config error: {exc}", file=sys.stderr)
        return EXIT_CODES['config_error']
    except RecoatError as exc:
        print(f"❌ Run aborted: {exc}", file=sys.stderr)
        return EXIT_CODES['runtime_abort']


if __name__ == "__main__":
    sys.exit(main())
