"""
Anatomy of one round
====================

Build one hierarchy with each protocol on the same deployment and the same
election coins, then look at what came out of it.
"""

import numpy as np

from mlcsim import ProtocolParams, deploy, operate
from mlcsim.harness import election_rng
from mlcsim.protocols import PROTOCOLS, cluster_setup

params = ProtocolParams()

for protocol in PROTOCOLS:
    world = deploy(100, seed=1)
    world.round = 1
    topo, ledger = cluster_setup(world, protocol, params, election_rng(1, 1))
    op = operate(topo, world, params.energy, ledger=ledger)

    heads = {lv: len(ids) for lv, ids in sorted(topo.ch_set().items())}
    members = topo.members()
    attached = members[~topo.orphans[members]]
    d = world.dist[attached, topo.parent[attached]]
    print(f"--- {protocol}")
    print("  heads per level:", heads)
    print("  orphans (straight to sink):", int(topo.orphans.sum()))
    print(f"  mean member-to-head distance: {d.mean():.1f} m")
    print(f"  average hops: {op.hops.mean():.3f}")
    print(f"  control/data: {ledger.control_tx}/{ledger.data_tx} = {ledger.control_tx / ledger.data_tx:.2f}")
    kinds = ("advert", "join", "dejoin", "probe", "ack")
    print("  " + ", ".join(f"{k}={ledger.count(k)}" for k in kinds))
    print(f"  energy spent: {(0.1 * 100 - world.total_energy()) * 1e3:.2f} mJ")
