"""
Sweeping phi and the MRP cache
==============================

``phi`` trades residual energy against closeness in the election; the cache
size decides how often PAMC has to probe for power levels.
"""

from mlcsim import SimConfig, SweepSpec, emit_csv, sweep


rows = sweep(SimConfig(protocol="lamc", n=100, seeds=3), SweepSpec("phi", (0.2, 0.5, 0.8)))
for phi, exp in rows:
    print(f"lamc phi={phi}: HND {exp.mean['hnd']:.1f}")

rows = sweep(SimConfig(protocol="pamc", n=100, seeds=3), SweepSpec("cache_capacity", (1, 10, 20)))
for cap, exp in rows:
    print(f"pamc cache={cap}: HND {exp.mean['hnd']:.1f}  overhead {exp.mean['overhead_ratio']:.2f}")

# the same table the command line would write
path = emit_csv(rows, "cache_sweep.csv")
print(path.read_text())
