import sys

import pandas as pd

# Load the aggregate of a sweep
path = sys.argv[1] if len(sys.argv) > 1 else 'results/sweep_gamma/aggregate.csv'
df = pd.read_csv(path)

print("=" * 60)
print("📊 SWEEP AGGREGATE ANALYSIS")
print("=" * 60)

print(f"\n✅ Total runs: {len(df)}")
print(f"✅ Columns: {list(df.columns)}")

# Status breakdown
print("\n" + "=" * 60)
print("STATUS BREAKDOWN:")
print("=" * 60)
print(df['status'].value_counts())

done = df[df['status'] == 'completed']
sweep_keys = [c for c in df.columns if '.' in c]

# Layer metrics per sweep value
for key in sweep_keys:
    print("\n" + "=" * 60)
    print(f"LAYER METRICS BY {key}:")
    print("=" * 60)
    summary = done.groupby(key)[['mean_packing', 'std_packing', 'relative_height',
                                 'relative_roughness']].mean()
    print(summary.round(4))

# Spread between replicates of the same point
if 'run.seed' in sweep_keys:
    print("\n" + "=" * 60)
    print("REPLICATE SPREAD OF <Phi_t>:")
    print("=" * 60)
    print(f"{done['mean_packing'].max() - done['mean_packing'].min():.4f}")

print("\n✅ Sweep exploration complete!")
