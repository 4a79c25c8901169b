"""
Recoat Runner

Executes one resolved config through the fixed stage sequence:
1. fill      - sample the powder and seed it on a lattice in the reservoir
2. settle    - let the reservoir pile come to rest under gravity
3. dose      - raise the platform to push the dispensed volume above the walls
4. spread    - drive the blade across the bed into the overflow pit
5. relax     - short settle of the spread layer
6. evaluate  - layer metrics on the central window

Every stage writes a snapshot; the run directory also receives the field
CSVs, layer_report.csv, run_log.json and resolved_config.cfg.
"""

import sys
import os
import math
import time

import numpy as np
import pandas as pd

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.process_config import LATTICE_CLEARANCE_FACTOR
from dem.cell_grid import CellGrid
from dem.errors import CapacityError, OutOfDomainError, TimestepGuardError
from dem.force_engine import ForceEngine
from dem.integrator import VelocityVerletIntegrator
from geometry.boundaries import wrap_y
from harness.run_log import RunLog
from harness.snapshot_io import write_snapshot, write_field_csv
from metrics.layer_report import evaluate_layer
from powder.seeding import lattice_shape, seed_lattice
from powder.settling import PileRegion, settle
from powder.size_distribution import sample_volume


class RecoatRunner:
    """Staged execution of a single recoating experiment"""

    def __init__(self, config, run_log=None, verbose=None):
        self.config = config
        self.values = config.values
        self.verbose = self.values['run.verbose'] if verbose is None else verbose
        self.output_dir = self.values['run.output_dir']
        label = os.path.basename(os.path.normpath(self.output_dir)) or 'run'
        self.run_log = run_log if run_log is not None else RunLog(label, self.verbose)
        self.material = config.material()
        self.geometry = None
        self.state = None
        self.engine = None
        self.integrator = None
        self.stage_timings = {}
        self.particle_counts = {}
        self.settle_report = None
        self.relax_report = None
        self.layer_report = None
        self.fields = {}
        self.nonconverged = []
        self.total_steps = 0
        self.stage = None

    # STAGES

    def fill(self):
        """Sample diameters for the dispensed volume and seed the reservoir"""
        v = self.values
        t0 = v['geometry.layer_thickness']
        width = v['geometry.bed_width']
        dispensed = v['geometry.surplus_factor'] * v['geometry.bed_length'] * width * t0
        diameters = sample_volume(self.config.distribution(), dispensed * v['geometry.fill_factor'],
                                  v['run.seed'])

        pitch = float(diameters.max()) * (1.0 + LATTICE_CLEARANCE_FACTOR)
        nx, ny, _ = lattice_shape((0.0, 0.0, 0.0), (v['geometry.reservoir_length'], width, pitch),
                                  pitch)
        if nx * ny == 0:
            raise CapacityError(len(diameters), 0)
        layers = int(math.ceil(len(diameters) / float(nx * ny)))
        reservoir_depth = (layers + 1) * pitch

        self.geometry = self.config.geometry(reservoir_depth)
        lower, upper = self.geometry.reservoir_region()
        self.state = seed_lattice(diameters, lower, upper, self.material,
                                  jitter_seed=v['run.jitter_seed'], pitch=pitch)
        self.state.position = wrap_y(self.state.position, width)

        bounds_lower, bounds_upper = self.geometry.domain_bounds()
        grid = CellGrid.for_particles(bounds_lower, bounds_upper, float(diameters.max()),
                                      self.material.g_cut, v['run.skin'])
        self.engine = ForceEngine(self.material, grid, self.geometry.walls(), v['run.skin'],
                                  v['run.mode'], v['run.threads'])
        self.integrator = VelocityVerletIntegrator(self.engine, v['run.dt'],
                                                   v['run.allow_unstable_timestep'])
        self.integrator.check_timestep(self.state, v['run.dt'])

        self.run_log.info('fill', f"Seeded {self.state.count} particles in {layers} lattice layers", {
            'count': self.state.count,
            'pitch': pitch,
            'reservoir_depth': reservoir_depth,
            'pit_depth': self.geometry.pit_depth,
            'dt': v['run.dt'],
            'cells': grid.cell_count,
        })

    def settle_reservoir(self):
        """Settle the reservoir pile and measure its bulk packing"""
        g = self.geometry
        region = PileRegion(lower=(g.reservoir_left, 0.0, g.platform_top_initial),
                            upper_xy=(g.reservoir_right, g.bed_width),
                            voxel=self.values['metrics.voxel_size'], d_max0=g.d_max0,
                            period_y=g.bed_width)
        _, report = settle(self.integrator, self.state, self.config.settle_criterion(),
                           progress=self._progress('settle'),
                           progress_every=self.values['run.progress_every'], region=region)
        self.total_steps += report['steps']
        self.settle_report = report
        self._check_converged('settle', report)
        phi = report['packing_fraction']
        phi_text = 'n/a' if phi is None else f"{phi:.4f}"
        self.run_log.info('settle', f"Reservoir settled after {report['steps']} steps, "
                                    f"packing {phi_text}", _plain(report))

    def dose(self):
        """Raise the platform, then wait for the dwell before the blade starts"""
        g = self.geometry
        v = self.values
        phi = self.settle_report.get('packing_fraction') if self.settle_report else None
        if phi is None or not phi > 0:
            phi = v['geometry.packing_estimate']
            self.run_log.warning('dose', "No bulk packing measured, using the packing estimate",
                                 {'packing_estimate': phi})
        top = self.settle_report.get('surface_height') if self.settle_report else None
        if top is None:
            top = g.platform_top_initial
        dispensed = g.dispensed_volume(v['geometry.surplus_factor'])
        rise = max(0.0, g.layer_thickness - top) + dispensed / (g.reservoir_length * g.bed_width * phi)
        g.platform.schedule(self.state.time, rise, v['platform.rise_velocity'])
        g.blade.start_time = g.platform.blade_start_time
        self._advance_until(g.blade.start_time, 'dose')
        self.run_log.info('dose', f"Platform raised by {rise * 1e6:.1f} um", {
            'rise': rise,
            'rise_duration': g.platform.rise_duration,
            'blade_start_time': g.blade.start_time,
        })

    def spread(self):
        """Drive the blade until its back face has cleared the bed"""
        end = self.geometry.spread_end_time()
        self._advance_until(end, 'spread')
        self.run_log.info('spread', f"Blade reached x = {self.geometry.blade_end_x * 1e3:.3f} mm",
                          {'time': self.state.time})

    def relax(self):
        """Fixed relax interval, then settle until quiet"""
        self._advance_until(self.state.time + self.values['run.relax_time'], 'relax')
        g = self.geometry
        x_min, x_max, y_min, y_max = g.evaluation_window()
        region = PileRegion(lower=(x_min, y_min, 0.0), upper_xy=(x_max, y_max),
                            voxel=self.values['metrics.voxel_size'], d_max0=g.d_max0,
                            period_y=g.bed_width)
        _, report = settle(self.integrator, self.state, self.config.settle_criterion(),
                           progress=self._progress('relax'),
                           progress_every=self.values['run.progress_every'], region=region)
        self.total_steps += report['steps']
        self.relax_report = report
        self._check_converged('relax', report)
        self.run_log.info('relax', f"Layer at rest after {report['steps']} settle steps",
                          _plain(report))

    def evaluate(self):
        """Layer metrics on the evaluation window"""
        g = self.geometry
        self.layer_report, self.fields = evaluate_layer(
            self.state.position, self.state.radius, self.config.metric_spec(),
            g.layer_thickness, g.d_max0, self.config.sublayers())
        r = self.layer_report
        self.run_log.info('evaluate', f"<Phi_t> = {r.mean_packing:.4f}, "
                                      f"t/t0 = {r.relative_height:.4f}, "
                                      f"roughness/d0 = {r.relative_roughness:.4f}",
                          self.layer_report.to_row())

    # RUN

    def run(self):
        """
        Execute all stages

        Returns:
            RunRecord dict
        Raises:
            TimestepGuardError, OutOfDomainError after logging them as CRITICAL
        """
        os.makedirs(self.output_dir, exist_ok=True)
        self.config.write_resolved(self.output_dir)
        if self.verbose:
            print("\n" + "=" * 70)
            print(f"🧪 RECOAT RUN: {self.output_dir}")
            print(f"   config hash {self.config.config_hash()}, seed {self.values['run.seed']}")
            print("=" * 70)

        stages = [
            ('fill', self.fill),
            ('settle', self.settle_reservoir),
            ('dose', self.dose),
            ('spread', self.spread),
            ('relax', self.relax),
            ('evaluate', self.evaluate),
        ]
        try:
            for stage, action in stages:
                self.stage = stage
                started = time.perf_counter()
                action()
                self.stage_timings[stage] = time.perf_counter() - started
                self._record_stage(stage)
        except (TimestepGuardError, OutOfDomainError) as exc:
            self.run_log.critical(self.stage, f"Run aborted: {exc}", {'error': type(exc).__name__})
            self.run_log.save_run_log(os.path.join(self.output_dir, 'run_log.json'))
            if self.verbose:
                self.run_log.print_run_summary()
            raise

        self._write_outputs()
        if self.verbose:
            self.run_log.print_run_summary()
        return self.record('completed')

    def record(self, status, error=None):
        """RunRecord of the current progress"""
        return {
            'config_hash': self.config.config_hash(),
            'seed': self.values['run.seed'],
            'output_dir': self.output_dir,
            'status': status,
            'error': error,
            'stage_timings': dict(self.stage_timings),
            'particle_counts': dict(self.particle_counts),
            'settle_report': _plain(self.settle_report) if self.settle_report else None,
            'relax_report': _plain(self.relax_report) if self.relax_report else None,
            'layer_report': self.layer_report.to_row() if self.layer_report else None,
            'sublayers': ([[a, b, phi] for a, b, phi in self.layer_report.sublayers]
                          if self.layer_report else []),
            'nonconverged': list(self.nonconverged),
            'steps': self.total_steps,
            'events': list(self.run_log.events),
        }

    # HELPERS

    def _advance_until(self, end_time, stage):
        dt = self.integrator.dt
        n_steps = max(0, int(math.ceil((end_time - self.state.time) / dt - 1e-9)))
        every = self.values['run.progress_every']
        snapshot_every = self.values['run.snapshot_every']
        for k in range(1, n_steps + 1):
            self.integrator.step(self.state)
            self.total_steps += 1
            if self.verbose and k % every == 0:
                print(f"   ⏳ [{stage}] step {k}/{n_steps}, t = {self.state.time:.6f} s, "
                      f"max speed {self.state.max_speed():.3e} m/s")
            if snapshot_every and self.total_steps % snapshot_every == 0:
                self._snapshot(f"step_{self.total_steps:09d}")

    def _progress(self, stage):
        if not self.verbose:
            return None

        def report(step, speed):
            print(f"   ⏳ [{stage}] step {step}, max speed {speed:.3e} m/s")
        return report

    def _check_converged(self, stage, report):
        if not report['converged']:
            self.nonconverged.append(stage)
            self.run_log.warning(stage, f"Settle did not converge within {report['steps']} steps",
                                 {'max_speed': report['max_speed']})

    def _record_stage(self, stage):
        counts = self.geometry.classify(self.state.position, self.state.radius)
        counts['total'] = self.state.count
        counts['dispensed'] = self.state.count - counts['reservoir']
        self.particle_counts[stage] = counts
        self._snapshot(stage)

    def _snapshot(self, name):
        blade_x = self.geometry.blade.position_at(self.state.time)
        write_snapshot(self.state, os.path.join(self.output_dir, 'snapshots', f"{name}.txt"), blade_x)

    def _write_outputs(self):
        for name, field in self.fields.items():
            write_field_csv(field, os.path.join(self.output_dir, 'fields', f"{name}.csv"))
        row = {'config_hash': self.config.config_hash(), 'seed': self.values['run.seed']}
        row.update(self.layer_report.to_row())
        pd.DataFrame([row]).to_csv(os.path.join(self.output_dir, 'layer_report.csv'),
                                   index=False, float_format='%.17g')
        self.run_log.save_run_log(os.path.join(self.output_dir, 'run_log.json'))


def _plain(report):
    """Report dict with numpy scalars converted for JSON"""
    plain = {}
    for key, value in report.items():
        if isinstance(value, np.generic):
            value = value.item()
        plain[key] = value
    return plain


def run_recoat(config, verbose=None):
    """
    Execute one resolved config

    Returns:
        RunRecord dict (see RecoatRunner.record)
    """
    return RecoatRunner(config, verbose=verbose).run()
