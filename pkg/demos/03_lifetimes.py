"""
Network lifetime, three ways
============================

Run each protocol to half-nodes-dead on the same seeds and compare the four
headline metrics.  Paired seeds mean the differences are what matters.
"""

import sys

import numpy as np

from mlcsim import SimConfig, run_experiment

n = int(sys.argv[1]) if len(sys.argv) > 1 else 100
seeds = int(sys.argv[2]) if len(sys.argv) > 2 else 5

results = {}
for protocol in ("eemc", "lamc", "pamc"):
    exp = run_experiment(SimConfig(protocol=protocol, n=n, seeds=seeds))
    results[protocol] = exp
    m = exp.mean
    print(f"{protocol}: FND {m['fnd']:.1f}  HND {m['hnd']:.1f}  "
          f"overhead {m['overhead_ratio']:.2f}  hops {m['average_hops']:.3f}")

# per-seed HND gap between LAMC and EEMC
gap = np.subtract(results["lamc"].values("hnd"), results["eemc"].values("hnd"))
print("LAMC - EEMC HND per seed:", gap.tolist())
