"""
Sweep Runner

Expands a config's sweep block into concrete runs, executes them in
parallel worker processes and aggregates one CSV row per run.

A failing run is recorded with its error and does not stop the sweep.
Only the parent process touches the run database.
"""

import sys
import os
import traceback

import pandas as pd
from joblib import Parallel, delayed

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from dem.errors import OutOfDomainError, TimestepGuardError
from harness.recoat_runner import RecoatRunner

AGGREGATE_FILE = 'aggregate.csv'


def _run_one(index, point, config, verbose):
    """Worker entry point; a failing run comes back as a record"""
    runner = RecoatRunner(config, verbose=verbose)
    try:
        record = runner.run()
    except Exception as exc:
        status = 'aborted' if isinstance(exc, (TimestepGuardError, OutOfDomainError)) else 'failed'
        if status == 'failed':
            runner.run_log.critical(runner.stage or 'fill', f"Run failed: {exc}",
                                    {'error': type(exc).__name__})
        record = runner.record(status, error=f"{type(exc).__name__}: {exc}")
        if verbose:
            traceback.print_exc()
    record['index'] = index
    record['sweep_point'] = point
    return record


def aggregate_rows(records, sweep_keys):
    """
    One flat row per record, stable column order

    Columns: sweep keys, index, seed, status, config_hash, then the layer
    report columns (empty for failed runs).
    """
    rows = []
    report_columns = []
    for record in records:
        for column in (record.get('layer_report') or {}):
            if column not in report_columns:
                report_columns.append(column)
    for record in sorted(records, key=lambda r: r['index']):
        row = {key: record['sweep_point'].get(key) for key in sweep_keys}
        row['index'] = record['index']
        row['seed'] = record['seed']
        row['status'] = record['status']
        row['config_hash'] = record['config_hash']
        report = record.get('layer_report') or {}
        for column in report_columns:
            row[column] = report.get(column)
        rows.append(row)
    columns = list(sweep_keys) + ['index', 'seed', 'status', 'config_hash'] + report_columns
    return pd.DataFrame(rows, columns=columns)


def run_sweep(config, jobs=None, store=None, reuse_cached=False, verbose=None):
    """
    Execute every point of the sweep block

    Args:
        config: RecoatConfig with an optional sweep block
        jobs: worker processes (default sweep.jobs)
        store: optional RunRecordStore, written by this process only
        reuse_cached: skip points whose config hash already has a completed run
    Returns:
        (list of RunRecord dicts in sweep order, aggregate DataFrame)
    """
    jobs = jobs or config['sweep.jobs']
    verbose = config['run.verbose'] if verbose is None else verbose
    runs = config.expand_sweep()
    sweep_keys = list(config.sweep)
    base_dir = config['run.output_dir']

    print("\n" + "=" * 70)
    print(f"🧪 SWEEP: {len(runs)} runs over {', '.join(sweep_keys) or 'no sweep keys'}")
    print(f"   {jobs} worker(s), output {base_dir}")
    print("=" * 70)

    cached = {}
    pending = []
    for index, (point, run_config) in enumerate(runs):
        if reuse_cached and store is not None:
            hit, run_id = store.check_cache(run_config.config_hash())
            if hit:
                cached[index] = _cached_record(store, run_id, index, point, run_config)
                print(f"   ✅ run {index:03d}: cache hit (run #{run_id})")
                continue
        pending.append((index, point, run_config))

    # workers print nothing unless a single job runs in-process
    worker_verbose = verbose and jobs == 1
    executed = Parallel(n_jobs=jobs, backend='loky')(
        delayed(_run_one)(index, point, run_config, worker_verbose)
        for index, point, run_config in pending
    )

    records = sorted(list(cached.values()) + list(executed), key=lambda r: r['index'])
    for record in executed:
        if store is not None:
            store.save_record(record, sweep_label=base_dir)
        marker = '✅' if record['status'] == 'completed' else '❌'
        print(f"   {marker} run {record['index']:03d}: {record['status']}"
              + (f" ({record['error']})" if record.get('error') else ''))

    frame = aggregate_rows(records, sweep_keys)
    os.makedirs(base_dir, exist_ok=True)
    frame.to_csv(os.path.join(base_dir, AGGREGATE_FILE), index=False, float_format='%.17g')
    failed = len([r for r in records if r['status'] != 'completed'])
    print(f"\n✅ Aggregate written: {os.path.join(base_dir, AGGREGATE_FILE)} "
          f"({len(records)} rows, {failed} failed)")
    return records, frame


def _cached_record(store, run_id, index, point, run_config):
    """Rebuild a RunRecord from the database"""
    run = store.get_run(run_id)
    report = store.get_layer_report(run_id) or {}
    layer = {k: v for k, v in report.items() if k not in ('report_id', 'run_id', 'sublayers')}
    d0 = run_config['distribution.d_max0']
    for z_low, z_high, phi in report.get('sublayers', []):
        layer[f"sublayer_{z_low / d0:g}_{z_high / d0:g}"] = phi
    return {
        'config_hash': run['config_hash'],
        'seed': run['seed'],
        'output_dir': run['output_dir'],
        'status': run['status'],
        'error': run['error'],
        'layer_report': layer,
        'index': index,
        'sweep_point': point,
    }
