import sqlite3
import sys

db_path = sys.argv[1] if len(sys.argv) > 1 else 'results/runs.db'
db = sqlite3.connect(db_path)
db.row_factory = sqlite3.Row

# Show runs
print("=" * 70)
print("RUNS IN DATABASE")
print("=" * 70)
cursor = db.execute('SELECT * FROM runs')
for row in cursor:
    print(f"ID: {row['run_id']}, Status: {row['status']}, Seed: {row['seed']}, Dir: {row['output_dir']}")

# Show layer reports
print("\n" + "=" * 70)
print("LAYER REPORTS IN DATABASE")
print("=" * 70)
cursor = db.execute('SELECT * FROM layer_reports')
for row in cursor:
    print(f"Run: {row['run_id']}, <Phi_t>: {row['mean_packing']:.4f}, "
          f"t/t0: {row['relative_height']:.4f}, roughness/d0: {row['relative_roughness']:.4f}")

# Show warnings and critical events
print("\n" + "=" * 70)
print("FLAGGED EVENTS IN DATABASE")
print("=" * 70)
cursor = db.execute("SELECT * FROM run_events WHERE level != 'INFO'")
for row in cursor:
    print(f"Run: {row['run_id']}, Stage: {row['stage']}, Level: {row['level']}, {row['message']}")

db.close()
