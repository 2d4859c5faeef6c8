"""Cluster set-up for EEMC, LAMC and PAMC, and the shared data phase.

A set-up builds a sink-rooted forest level by level:

* the sink collects reports and announces network-wide totals,
* level-1 heads are drawn by Bernoulli election and advertise at a shrinking
  radius, and every regular node in range answers each one with a join,
* every head whose member set is larger than ``stop_size`` runs the next
  election among its members, until ``max_level``.

EEMC attaches a regular node to the last head it joined.  LAMC and PAMC
remember the closest head heard at any level and move there once the hierarchy
is complete, paying an extra join and de-join when that changes the choice.
PAMC measures closeness in discrete power levels learnt by probing, breaking
ties in favour of the head heard first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .election import (
    ElectionParams,
    ElectionTotals,
    clamp_probability,
    level1_probability,
    levelj_probability,
    optimal_ch_count,
    reciprocal_distance,
    broadcast_range,
)
from .model import NOBODY, SINK, EnergyModel, World, network_radius
from .power import MrpCache, PowerTable, UnreachableError, build_power_table, covering_level, discover_mrp
from .radio import MessageLedger, Radio

PROTOCOLS = ("eemc", "lamc", "pamc")


@dataclass(frozen=True)
class ProtocolParams:
    phi: float = 0.8
    max_level: int = 5
    stop_size: int = 2
    power_levels: int = 6
    cache_capacity: int = 10
    energy: EnergyModel = field(default_factory=EnergyModel)
    #: how a power level enters the PAMC probabilities: "ordinal" uses the
    #: level index, "range2" the square of the level's range
    mrp_metric: str = "ordinal"

    def __post_init__(self):
        if not 0.0 <= self.phi <= 1.0:
            raise ValueError(f"phi must lie in [0, 1], got {self.phi}")
        if self.max_level < 1:
            raise ValueError("max_level must be at least 1")
        if self.power_levels < 2:
            raise ValueError("need at least two power levels")
        if self.cache_capacity < 0:
            raise ValueError("cache capacity must be non-negative")
        if self.mrp_metric not in ("ordinal", "range2"):
            raise ValueError(f"unknown mrp_metric {self.mrp_metric!r}")


class CandidateCH(NamedTuple):
    ch: int
    ch_level: int
    metric: float
    order: int


@dataclass
class Topology:
    """One round's forest.

    ``parent`` holds a head id, ``SINK`` or ``NOBODY`` (nodes dead before the
    round).  ``level`` is the hop depth below the sink.  ``clusters`` maps each
    head to the members that joined it during set-up, which is what its
    election statistics were computed over.
    """

    parent: np.ndarray
    level: np.ndarray
    ch_level: np.ndarray
    clusters: dict
    cluster_size: dict
    orphans: np.ndarray
    candidates: dict | None = None
    provisional: np.ndarray | None = None

    def ch_set(self) -> dict:
        out = {}
        for i in np.flatnonzero(self.ch_level):
            out.setdefault(int(self.ch_level[i]), []).append(int(i))
        return out

    @property
    def heads(self) -> np.ndarray:
        return np.flatnonzero(self.ch_level)

    @property
    def depth(self) -> int:
        return int(self.ch_level.max(initial=0))

    def members(self) -> np.ndarray:
        return np.flatnonzero((self.ch_level == 0) & (self.parent != NOBODY))


def pamc_state(world: World, params: ProtocolParams) -> PowerTable:
    """Attach the lifetime PAMC state (power table, caches, sink MRPs) to ``world``."""
    table = getattr(world, "power_table", None)
    if table is None or table.levels != params.power_levels:
        r_max = float(world.dist_sink.max()) or 1.0
        table = build_power_table(r_max, params.power_levels)
        world.power_table = table
    if world.caches is None or (world.caches and world.caches[0].capacity != params.cache_capacity):
        world.caches = [MrpCache(params.cache_capacity) for _ in range(len(world))]
    if world.sink_mrp is None:
        world.sink_mrp = np.zeros(len(world), dtype=int)
    return table


def _mrp_weight(levels, table: PowerTable, params: ProtocolParams):
    levels = np.asarray(levels, dtype=int)
    if params.mrp_metric == "ordinal":
        return levels.astype(float)
    return np.asarray(table.ranges, dtype=float)[levels - 1] ** 2


class _Probes:
    """Collects MRP discoveries so their probes and acks go out as two ordered batches."""

    def __init__(self, table: PowerTable):
        self.table = table
        self.src, self.dst, self.level = [], [], []

    def add(self, src, dst, level):
        self.src.append(src)
        self.dst.append(dst)
        self.level.append(level)

    def flush(self, radio: Radio):
        if not self.src:
            return
        L = self.table.levels
        src = np.asarray(self.src, dtype=int)
        dst = np.asarray(self.dst, dtype=int)
        mrp = np.asarray(self.level, dtype=int)
        # descent from the top level down to the first silent one (or level 1)
        count = L - np.maximum(mrp - 1, 1) + 1
        first = np.repeat(np.cumsum(count) - count, count)
        lv = L - (np.arange(count.sum()) - first)
        p_dst = np.repeat(dst, count)
        p_dst = np.where(lv >= np.repeat(mrp, count), p_dst, NOBODY)
        ranges = np.asarray(self.table.ranges, dtype=float)[lv - 1]
        radio.unicast("probe", np.repeat(src, count), p_dst, ranges)
        acks = count - (mrp > 1)
        radio.unicast("ack", np.repeat(dst, acks), np.repeat(src, acks))
        self.src, self.dst, self.level = [], [], []


def _discover_sink_mrp(world: World, radio: Radio, table: PowerTable, nodes) -> None:
    probes = _Probes(table)
    for u in nodes:
        if world.sink_mrp[u] == 0:
            res = discover_mrp(world.pos[u], world.sink, table, distance=world.dist_sink[u])
            world.sink_mrp[u] = res.level
            probes.add(int(u), SINK, res.level)
    probes.flush(radio)


def cluster_setup(world: World, protocol: str, params: ProtocolParams, rng: np.random.Generator,
                  ledger: MessageLedger | None = None, trace: bool = False):
    """Run one set-up phase of ``protocol``; returns ``(Topology, MessageLedger)``."""
    if protocol not in PROTOCOLS:
        raise ValueError(f"unknown protocol {protocol!r}")
    if not world.alive.any():
        raise ValueError("all nodes are dead")
    ledger = ledger if ledger is not None else MessageLedger()
    radio = Radio(world, params.energy, ledger)
    pamc = protocol == "pamc"
    closest = protocol != "eemc"
    table = pamc_state(world, params) if pamc else None
    n = len(world)
    alive = world.alive
    world.ch_level[:] = 0
    ch_level = world.ch_level

    # (i)-(ii) start beacon, per-node report, sink command with network totals
    if closest:
        radio.broadcast("beacon", SINK, math.inf)
    nodes = world.alive_ids()
    if pamc:
        _discover_sink_mrp(world, radio, table, nodes)
    radio.unicast("report", nodes, SINK)
    radio.broadcast("command", SINK, math.inf)

    R = network_radius(world)
    n_opt = optimal_ch_count(world.n_alive)
    eparams = ElectionParams(params.phi, n_opt)

    # (iii) level-1 election over the whole active set
    part = world.alive_ids()
    energy = world.energy[part]
    if pamc:
        recip = 1.0 / _mrp_weight(world.sink_mrp[part], table, params)
    else:
        recip = reciprocal_distance(world.dist_sink[part])
    p = level1_probability(energy, recip, ElectionTotals.of(energy, recip), eparams)
    # one uniform per node id and level: paired runs of different protocols see the same coins
    coins = rng.random(n)
    won = coins[part] < clamp_probability(p)
    if not won.any():
        won[np.argmax(p)] = True
    new_heads = [(int(u), SINK, ()) for u in part[won]]

    parent = np.full(n, NOBODY, dtype=int)
    latest = np.full(n, NOBODY, dtype=int)  # head of the most recent join
    best = np.full(n, NOBODY, dtype=int)  # closest head heard so far
    best_metric = np.full(n, np.inf)
    n_heard = 0
    clusters: dict = {}
    cluster_size: dict = {}
    chains: dict = {}
    radius: dict = {}
    candidates = {} if trace else None

    level = 1
    while new_heads:
        for ch, par, chain in new_heads:
            ch_level[ch] = level
            parent[ch] = par
            chains[ch] = chain

        # adverts, then closeness probing, then one join per advert heard
        adverts = sorted(h for h, _, _ in new_heads)
        radii = [broadcast_range(R, n_opt, chains[ch]) for ch in adverts]
        if pamc:
            radii = [table.range_of(covering_level(table, r)) for r in radii]
        radius.update(zip(adverts, radii))
        heard = radio.broadcast_many("advert", adverts, radii)
        heard = [h[(ch_level[h] == 0) & alive[h]] for h in heard]
        if pamc:
            metrics = _mrp_many(world, table, adverts, heard, radio)
        else:
            metrics = [world.dist[ch, h] for ch, h in zip(adverts, heard)]
        j_src = np.concatenate(heard) if heard else np.empty(0, dtype=int)
        j_dst = np.repeat(adverts, [len(h) for h in heard]).astype(int)
        ok = radio.unicast("join", j_src, j_dst)
        start = 0
        for ch, h, metric in zip(adverts, heard, metrics):
            mask = ok[start:start + len(h)]
            start += len(h)
            h, metric = h[mask], metric[mask]
            if not len(h):
                continue
            if trace:
                for k, u in enumerate(h.tolist()):
                    candidates.setdefault(u, []).append(CandidateCH(ch, level, float(metric[k]), n_heard + k))
            n_heard += len(h)
            clusters[ch] = (h, metric)
            latest[h] = ch
            better = metric < best_metric[h]
            best[h[better]] = ch
            best_metric[h[better]] = metric[better]

        # per-cluster command and next-level election
        new_heads = []
        coins = rng.random(n)
        if level < params.max_level:
            electing = []
            for ch in adverts:
                if ch not in clusters or not alive[ch]:
                    continue
                members, metric = clusters[ch]
                keep = alive[members] & (ch_level[members] == 0)
                if keep.sum() > params.stop_size:
                    electing.append(ch)
                    cluster_size[ch] = int(keep.sum())
            radio.broadcast_many("command", electing, [radius[ch] for ch in electing])
            for ch in electing:
                members, metric = clusters[ch]
                keep = alive[members] & (ch_level[members] == 0)
                if not alive[ch] or not keep.any():
                    continue
                members, metric = members[keep], metric[keep]
                energy = world.energy[members]
                if pamc:
                    recip = 1.0 / _mrp_weight(metric, table, params)
                else:
                    recip = reciprocal_distance(metric)
                totals = ElectionTotals(float(energy.sum()), float(recip.sum()), cluster_size[ch])
                p = levelj_probability(energy, recip, totals, eparams)
                won = coins[members] < clamp_probability(p)
                if not won.any():
                    won[np.argmax(p)] = True
                # claimed now so an overlapping cluster cannot elect it again
                ch_level[members[won]] = level + 1
                chain = chains[ch] + (cluster_size[ch],)
                new_heads.extend((int(u), ch, chain) for u in members[won])
        level += 1

    # finalisation: EEMC keeps the latest join, LAMC/PAMC move to the closest head heard
    regular = np.flatnonzero(alive & (ch_level == 0))
    final = latest.copy()
    if closest:
        choice = best[regular]
        usable = (choice != NOBODY) & alive[np.maximum(choice, 0)]
        choice = np.where(usable, choice, latest[regular])
        final[regular] = choice
        movers = regular[(choice != latest[regular]) & (choice != NOBODY) & (latest[regular] != NOBODY)]
        if len(movers):
            radio.unicast("join", movers, final[movers])
            radio.unicast("dejoin", movers, latest[movers])
    # a head that died during set-up cannot take members
    stale = (final[regular] != NOBODY) & ~alive[np.maximum(final[regular], 0)]
    final[regular[stale]] = NOBODY

    regular = np.flatnonzero(alive & (ch_level == 0))
    orphans = np.zeros(n, dtype=bool)
    orphans[regular[final[regular] == NOBODY]] = True
    parent[regular] = np.where(final[regular] == NOBODY, SINK, final[regular])
    depth = np.zeros(n, dtype=int)
    heads = ch_level > 0
    depth[heads] = ch_level[heads]
    attached = regular[~orphans[regular]]
    depth[attached] = ch_level[parent[attached]] + 1
    depth[orphans] = 1
    topo = Topology(parent, depth, ch_level.copy(), clusters, cluster_size, orphans,
                    candidates, latest)
    return topo, ledger


def _mrp_many(world: World, table: PowerTable, heads, heard, radio: Radio) -> list:
    """MRP from every hearer to the head it heard, probing on cache misses."""
    probes = _Probes(table)
    caches = world.caches
    out = []
    ranges = np.asarray(table.ranges)
    for ch, nodes in zip(heads, heard):
        d = world.dist[ch, nodes]
        if np.any(d > table.max_range):
            raise UnreachableError(f"head {ch} is beyond the top power level")
        # what a full probe descent would find; the cache is consulted first
        fresh = np.searchsorted(ranges, d, side="left") + 1
        metric = np.empty(len(nodes))
        for k, u in enumerate(nodes.tolist()):
            cache = caches[u]
            hit = cache.lookup(ch)
            if hit is None:
                hit = int(fresh[k])
                cache.insert(ch, hit)
                probes.add(u, ch, hit)
            metric[k] = hit
        out.append(metric)
    probes.flush(radio)
    return out


def setup_eemc(world, params, rng, **kw):
    return cluster_setup(world, "eemc", params, rng, **kw)


def setup_lamc(world, params, rng, **kw):
    return cluster_setup(world, "lamc", params, rng, **kw)


def setup_pamc(world, params, rng, **kw):
    return cluster_setup(world, "pamc", params, rng, **kw)


@dataclass
class OperationReport:
    data_tx: int
    #: hop count of every source packet that reached the sink
    hops: np.ndarray
    ledger: MessageLedger
    delivered: np.ndarray = None


def operate(topology: Topology, world: World, model: EnergyModel,
            ledger: MessageLedger | None = None) -> OperationReport:
    """Data phase: every live node contributes one reading.

    Regular nodes send to their parent (orphans straight to the sink).  Heads
    are served deepest level first: each fuses what it received plus its own
    reading and forwards a single packet upward.
    """
    ledger = ledger if ledger is not None else MessageLedger()
    radio = Radio(world, model, ledger)
    n = len(world)
    data_before = ledger.data_tx
    parent = topology.parent
    ch_level = topology.ch_level

    received = np.zeros(n, dtype=int)
    arrived = np.zeros(n, dtype=bool)  # packet from node i reached its parent

    senders = np.flatnonzero(world.alive & (ch_level == 0) & (parent != NOBODY))
    ok = radio.unicast("data", senders, parent[senders])
    arrived[senders] = ok
    to_head = senders[ok & (parent[senders] >= 0)]
    np.add.at(received, parent[to_head], 1)

    for lv in range(topology.depth, 0, -1):
        heads = np.flatnonzero((ch_level == lv) & world.alive)
        if not len(heads):
            continue
        survived = radio.aggregate(heads, received[heads] + 1)
        heads = heads[survived]
        ok = radio.unicast("data", heads, parent[heads])
        arrived[heads] = ok
        up = heads[ok & (parent[heads] >= 0)]
        np.add.at(received, parent[up], 1)

    # a source is delivered when every hop on its path arrived
    delivered = arrived.copy()
    order = np.argsort(np.where(parent == NOBODY, 0, topology.level), kind="stable")
    for i in order.tolist():
        p = parent[i]
        if delivered[i] and p >= 0:
            delivered[i] = delivered[p]
    hops = topology.level[delivered].astype(float)
    return OperationReport(ledger.data_tx - data_before, hops, ledger, delivered)
