"""
Run Record Store

Handles all database operations:
- Create tables
- Insert runs, reports and events
- Query runs
- Config-hash cache
- Statistics
"""

import sys
import os
import json
import sqlite3

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from database.schema import DATABASE_SCHEMA

LAYER_COLUMNS = [
    'mean_packing', 'std_packing', 'mean_packing_t0', 'std_packing_t0', 'mean_height',
    'std_height', 'relative_height', 'relative_roughness', 'nominal_thickness'
]


class RunRecordStore:
    """Manage all run-record database operations"""

    def __init__(self, db_path='results/runs.db', verbose=False):
        """Initialize database connection"""
        self.db_path = db_path
        self.verbose = verbose
        directory = os.path.dirname(db_path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        self.connection = None
        self.connect()

    def connect(self):
        """Connect to database"""
        self.connection = sqlite3.connect(self.db_path)
        self.connection.row_factory = sqlite3.Row  # Return rows as dicts
        if self.verbose:
            print(f"✅ Connected to database: {self.db_path}")

    def initialize_database(self):
        """Create all tables"""
        cursor = self.connection.cursor()
        cursor.executescript(DATABASE_SCHEMA)
        self.connection.commit()

    # RUNS

    def add_run(self, config_hash, output_dir=None, seed=None, sweep_label=None,
                status='pending'):
        """
        Add a new run
        Returns: run_id
        """
        cursor = self.connection.cursor()
        cursor.execute('''
            INSERT INTO runs (config_hash, status, output_dir, seed, sweep_label)
            VALUES (?, ?, ?, ?, ?)
        ''', (config_hash, status, output_dir, seed, sweep_label))
        self.connection.commit()
        return cursor.lastrowid

    def finish_run(self, run_id, status, particle_counts=None, stage_timings=None, error=None):
        """Store the outcome of a run"""
        cursor = self.connection.cursor()
        cursor.execute('''
            UPDATE runs
            SET status = ?, particle_counts = ?, stage_timings = ?, error = ?,
                completed_at = CURRENT_TIMESTAMP
            WHERE run_id = ?
        ''', (status, json.dumps(particle_counts or {}), json.dumps(stage_timings or {}),
              error, run_id))
        self.connection.commit()

    def add_layer_report(self, run_id, row, sublayers=None):
        """Add layer metrics (row as produced by LayerReport.to_row)"""
        cursor = self.connection.cursor()
        cursor.execute(f'''
            INSERT INTO layer_reports (run_id, {', '.join(LAYER_COLUMNS)}, sublayers)
            VALUES (?, {', '.join('?' for _ in LAYER_COLUMNS)}, ?)
        ''', (run_id, *[row.get(c) for c in LAYER_COLUMNS], json.dumps(sublayers or [])))
        self.connection.commit()

    def add_settle_report(self, run_id, stage, report):
        """Add a settle or relax report"""
        cursor = self.connection.cursor()
        cursor.execute('''
            INSERT INTO settle_reports
            (run_id, stage, converged, steps, packing_fraction, coordination_number,
             max_relative_penetration, max_speed)
            VALUES (?, ?, ?, ?, ?, ?, ?, ?)
        ''', (run_id, stage, 1 if report.get('converged') else 0, report.get('steps'),
              report.get('packing_fraction'), report.get('coordination_number'),
              report.get('max_relative_penetration'), report.get('max_speed')))
        self.connection.commit()

    def add_events(self, run_id, events):
        """Copy run-log events"""
        cursor = self.connection.cursor()
        cursor.executemany('''
            INSERT INTO run_events (run_id, stage, level, message, timestamp)
            VALUES (?, ?, ?, ?, ?)
        ''', [(run_id, e['stage'], e['level'], e['message'], e['timestamp']) for e in events])
        self.connection.commit()

    def save_record(self, record, sweep_label=None):
        """
        Store a complete run record (as returned by the recoat runner)
        Returns: run_id
        """
        run_id = self.add_run(record['config_hash'], record.get('output_dir'),
                              record.get('seed'), sweep_label, 'running')
        if record.get('layer_report'):
            self.add_layer_report(run_id, record['layer_report'], record.get('sublayers'))
        for stage in ('settle', 'relax'):
            if record.get(f'{stage}_report'):
                self.add_settle_report(run_id, stage, record[f'{stage}_report'])
        self.add_events(run_id, record.get('events', []))
        self.finish_run(run_id, record['status'], record.get('particle_counts'),
                        record.get('stage_timings'), record.get('error'))
        if record['status'] == 'completed':
            self.add_to_cache(record['config_hash'], run_id)
        return run_id

    def get_run(self, run_id):
        """Get run by ID"""
        cursor = self.connection.cursor()
        cursor.execute('SELECT * FROM runs WHERE run_id = ?', (run_id,))
        row = cursor.fetchone()
        return dict(row) if row else None

    def get_all_runs(self, status=None):
        """Get all runs, optionally filtered by status"""
        cursor = self.connection.cursor()
        if status:
            cursor.execute('SELECT * FROM runs WHERE status = ? ORDER BY run_id', (status,))
        else:
            cursor.execute('SELECT * FROM runs ORDER BY run_id')
        return [dict(row) for row in cursor.fetchall()]

    def get_runs_by_hash(self, config_hash):
        cursor = self.connection.cursor()
        cursor.execute('SELECT * FROM runs WHERE config_hash = ? ORDER BY run_id', (config_hash,))
        return [dict(row) for row in cursor.fetchall()]

    def get_layer_report(self, run_id):
        """Layer report of a run, sublayers decoded"""
        cursor = self.connection.cursor()
        cursor.execute('SELECT * FROM layer_reports WHERE run_id = ?', (run_id,))
        row = cursor.fetchone()
        if not row:
            return None
        report = dict(row)
        report['sublayers'] = json.loads(report['sublayers'] or '[]')
        return report

    def get_settle_reports(self, run_id):
        cursor = self.connection.cursor()
        cursor.execute('SELECT * FROM settle_reports WHERE run_id = ? ORDER BY settle_id', (run_id,))
        return [dict(row) for row in cursor.fetchall()]

    def get_events(self, run_id, level=None):
        cursor = self.connection.cursor()
        if level:
            cursor.execute('SELECT * FROM run_events WHERE run_id = ? AND level = ? ORDER BY event_id',
                           (run_id, level))
        else:
            cursor.execute('SELECT * FROM run_events WHERE run_id = ? ORDER BY event_id', (run_id,))
        return [dict(row) for row in cursor.fetchall()]

    # CACHING METHODS

    def check_cache(self, config_hash):
        """
        Check whether a completed run exists for this config hash
        Returns: (hit, run_id) or (False, None)
        """
        cursor = self.connection.cursor()
        cursor.execute('SELECT run_id FROM run_cache WHERE config_hash = ?', (config_hash,))
        row = cursor.fetchone()

        if row:
            # Update hit count
            cursor.execute('''
                UPDATE run_cache
                SET cache_hit_count = cache_hit_count + 1, last_hit = CURRENT_TIMESTAMP
                WHERE config_hash = ?
            ''', (config_hash,))
            self.connection.commit()
            return True, row[0]

        return False, None

    def add_to_cache(self, config_hash, run_id):
        """Register a completed run"""
        cursor = self.connection.cursor()
        try:
            cursor.execute('''
                INSERT INTO run_cache (config_hash, run_id) VALUES (?, ?)
            ''', (config_hash, run_id))
            self.connection.commit()
            return True
        except sqlite3.IntegrityError:
            # Already exists
            return False

    def get_cache_stats(self):
        """Get cache statistics"""
        cursor = self.connection.cursor()
        cursor.execute('''
            SELECT
                COUNT(*) as total_cached,
                SUM(cache_hit_count) as total_hits,
                AVG(cache_hit_count) as avg_hits
            FROM run_cache
        ''')
        row = cursor.fetchone()
        return dict(row) if row else {}

    # STATISTICS METHODS

    def get_run_statistics(self):
        """Counts by status and the mean layer metrics of completed runs"""
        runs = self.get_all_runs()
        cursor = self.connection.cursor()
        cursor.execute('''
            SELECT AVG(l.mean_packing) as avg_packing, AVG(l.relative_height) as avg_height
            FROM layer_reports l JOIN runs r ON l.run_id = r.run_id
            WHERE r.status = 'completed'
        ''')
        averages = dict(cursor.fetchone())
        cursor.execute("SELECT COUNT(*) FROM settle_reports WHERE converged = 0")
        unconverged = cursor.fetchone()[0]

        stats = {
            'total_runs': len(runs),
            'completed': len([r for r in runs if r['status'] == 'completed']),
            'failed': len([r for r in runs if r['status'] == 'failed']),
            'aborted': len([r for r in runs if r['status'] == 'aborted']),
            'unconverged_settles': unconverged,
            'avg_packing': averages['avg_packing'],
            'avg_relative_height': averages['avg_height'],
        }
        return stats

    def close(self):
        """Close database connection"""
        if self.connection:
            self.connection.close()
            self.connection = None


# Test the store
if __name__ == "__main__":
    print("=" * 70)
    print("TESTING RUN RECORD STORE")
    print("=" * 70)

    store = RunRecordStore('results/demo_runs.db', verbose=True)
    store.initialize_database()
    print("✅ Tables created")

    record = {
        'config_hash': 'demo',
        'seed': 1,
        'output_dir': 'results/demo',
        'status': 'completed',
        'layer_report': {'mean_packing': 0.55, 'std_packing': 0.03, 'relative_height': 0.86},
        'settle_report': {'converged': True, 'steps': 1000, 'packing_fraction': 0.6},
        'particle_counts': {'fill': {'reservoir': 100}},
        'events': [],
    }
    run_id = store.save_record(record)
    print(f"\n✅ Stored run #{run_id}")

    hit, cached_id = store.check_cache('demo')
    print(f"💾 Cache {'HIT' if hit else 'MISS'}: run #{cached_id}")

    print("\n📊 Run statistics:")
    for key, value in store.get_run_statistics().items():
        print(f"   {key}: {value}")

    store.close()
    print("\n✅ DATABASE TEST COMPLETE!")
