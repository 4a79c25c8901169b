"""
Database Schema Design

Defines tables for:
- Runs
- Layer reports
- Settle reports
- Run events
- Cache
"""

DATABASE_SCHEMA = '''

-- Runs Table (one row per resolved config execution)
CREATE TABLE IF NOT EXISTS runs (
    run_id INTEGER PRIMARY KEY AUTOINCREMENT,
    config_hash TEXT NOT NULL,
    status TEXT DEFAULT 'pending',
    output_dir TEXT,
    seed INTEGER,
    sweep_label TEXT,
    particle_counts TEXT,
    stage_timings TEXT,
    error TEXT,
    created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP,
    completed_at TIMESTAMP
);

-- Layer Reports Table (layer metrics of a run)
CREATE TABLE IF NOT EXISTS layer_reports (
    report_id INTEGER PRIMARY KEY AUTOINCREMENT,
    run_id INTEGER NOT NULL,
    mean_packing REAL,
    std_packing REAL,
    mean_packing_t0 REAL,
    std_packing_t0 REAL,
    mean_height REAL,
    std_height REAL,
    relative_height REAL,
    relative_roughness REAL,
    nominal_thickness REAL,
    sublayers TEXT,
    FOREIGN KEY (run_id) REFERENCES runs(run_id)
);

-- Settle Reports Table (settle and relax stages)
CREATE TABLE IF NOT EXISTS settle_reports (
    settle_id INTEGER PRIMARY KEY AUTOINCREMENT,
    run_id INTEGER NOT NULL,
    stage TEXT,
    converged INTEGER,
    steps INTEGER,
    packing_fraction REAL,
    coordination_number REAL,
    max_relative_penetration REAL,
    max_speed REAL,
    FOREIGN KEY (run_id) REFERENCES runs(run_id)
);

-- Run Events Table (run log entries)
CREATE TABLE IF NOT EXISTS run_events (
    event_id INTEGER PRIMARY KEY AUTOINCREMENT,
    run_id INTEGER,
    stage TEXT,
    level TEXT,
    message TEXT,
    timestamp TIMESTAMP DEFAULT CURRENT_TIMESTAMP,
    FOREIGN KEY (run_id) REFERENCES runs(run_id)
);

-- Cache Table (completed runs by config hash)
CREATE TABLE IF NOT EXISTS run_cache (
    cache_id INTEGER PRIMARY KEY AUTOINCREMENT,
    config_hash TEXT UNIQUE,
    run_id INTEGER,
    cache_hit_count INTEGER DEFAULT 0,
    last_hit TIMESTAMP,
    created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP,
    FOREIGN KEY (run_id) REFERENCES runs(run_id)
);

'''
