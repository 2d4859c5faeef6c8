"""Brute-force reference for one round on tiny worlds.

Written from the protocol description with plain floats and lists, one message
at a time, so it shares no code with the vectorised engine.  Coins come from a
scripted source: ``coins[k][i]`` is node ``i``'s uniform draw at election ``k``.
"""

import math
from collections import OrderedDict

E_ELEC, EPS_AMP, E_AGG = 50e-9, 10e-12, 5e-9
DATA, CTRL = 500, 10
SINK, NONE = -1, -2


class Trace:
    def __init__(self, pos, energy, sink=(500.0, 500.0)):
        self.pos = [tuple(map(float, p)) for p in pos]
        self.e = [float(x) for x in energy]
        self.sink = tuple(map(float, sink))
        self.msgs = []  # (kind, sender, receivers, bits, distance)
        self.aggs = []  # (node, signals)

    def d(self, a, b):
        pa = self.sink if a == SINK else self.pos[a]
        pb = self.sink if b == SINK else self.pos[b]
        return math.hypot(pa[0] - pb[0], pa[1] - pb[1])

    def alive(self, i):
        return self.e[i] > 0

    def spend(self, i, joules):
        if i != SINK:
            self.e[i] = max(0.0, self.e[i] - joules)

    def unicast(self, kind, s, r, dist=None):
        bits = DATA if kind == "data" else CTRL
        dist = self.d(s, r) if dist is None else dist
        self.spend(s, E_ELEC * bits + EPS_AMP * bits * dist * dist)
        got = r == SINK or (r >= 0 and self.alive(r))
        if r >= 0 and got:
            self.spend(r, E_ELEC * bits)
        self.msgs.append((kind, s, (r,) if got else (), bits, dist))

    def broadcast(self, kind, s, radius):
        heard = [i for i in range(len(self.pos)) if i != s and self.alive(i) and self.d(s, i) < radius]
        self.spend(s, E_ELEC * CTRL + EPS_AMP * CTRL * radius * radius)
        for i in heard:
            self.spend(i, E_ELEC * CTRL)
        self.msgs.append((kind, s, tuple(heard), CTRL, radius))
        return heard


def _prob(scale, phi, e, es, metric, metrics):
    return scale * (phi * e / sum(es) + (1 - phi) * (1 / metric) / sum(1 / m for m in metrics))


def one_round(tr: Trace, protocol, coins, phi=0.8, levels=6, capacity=10, max_level=5,
              caches=None, sink_mrp=None, table=None):
    """Run set-up and data phase; returns ``(parent, hops, caches, sink_mrp, table)``."""
    n = len(tr.pos)
    draws = iter(coins)
    pamc = protocol == "pamc"
    if pamc:
        if table is None:
            r_max = max(tr.d(i, SINK) for i in range(n))
            table = [r_max * k / levels for k in range(1, levels)] + [r_max]
        caches = caches if caches is not None else [OrderedDict() for _ in range(n)]
        sink_mrp = sink_mrp if sink_mrp is not None else [0] * n

    def mrp_of(dist):
        return next(k + 1 for k, r in enumerate(table) if r >= dist)

    def probe(u, dst, dist):
        """Top-down descent; probes first, acks are returned for later sending."""
        m = mrp_of(dist)
        sent, acks = [], 0
        for lv in range(levels, 0, -1):
            answered = lv >= m
            sent.append((u, dst if answered else NONE, table[lv - 1]))
            if not answered:
                break
            acks += 1
        return m, sent, [(dst, u)] * acks

    alive = [i for i in range(n) if tr.alive(i)]
    if protocol != "eemc":
        tr.broadcast("beacon", SINK, math.inf)
    if pamc:
        probes, acks = [], []
        for u in alive:
            if sink_mrp[u] == 0:
                sink_mrp[u], p, a = probe(u, SINK, tr.d(u, SINK))
                probes += p
                acks += a
        for s, r, dist in probes:
            tr.unicast("probe", s, r, dist)
        for s, r in acks:
            tr.unicast("ack", s, r)
    for u in alive:
        tr.unicast("report", u, SINK)
    tr.broadcast("command", SINK, math.inf)

    alive = [i for i in range(n) if tr.alive(i)]
    R = max(tr.d(i, SINK) for i in alive)
    n_opt = max(1, round(math.sqrt(len(alive))))

    ch = {}  # head -> level
    parent = {}
    chain = {}
    c = next(draws)
    es = [tr.e[i] for i in alive]
    ms = [sink_mrp[i] if pamc else max(tr.d(i, SINK), 1.0) for i in alive]
    ps = [_prob(n_opt, phi, tr.e[i], es, m, ms) for i, m in zip(alive, ms)]
    won = [i for i, p in zip(alive, ps) if c[i] < min(1.0, max(0.0, p))]
    if not won:
        won = [alive[max(range(len(alive)), key=lambda k: (ps[k], -k))]]
    fresh = [(u, SINK, ()) for u in won]

    latest, best = {}, {}
    members = {}
    size = {}
    level = 1
    while fresh:
        for u, par, ch_chain in fresh:
            ch[u] = level
            parent[u] = par
            chain[u] = ch_chain
        heads = sorted(u for u, _, _ in fresh)
        radius = {}
        heard = {}
        for h in heads:
            r = R / math.sqrt(n_opt * math.prod(chain[h]))
            if pamc:
                r = table[min(mrp_of(r) if r <= table[-1] else levels, levels) - 1]
            radius[h] = r
            heard[h] = [i for i in tr.broadcast("advert", h, r) if i not in ch]
        metric = {}
        if pamc:
            probes, acks = [], []
            for h in heads:
                for u in heard[h]:
                    cache = caches[u]
                    if h in cache:
                        cache.move_to_end(h)
                        metric[u, h] = cache[h]
                        continue
                    m, p, a = probe(u, h, tr.d(u, h))
                    probes += p
                    acks += a
                    metric[u, h] = m
                    if capacity:
                        cache[h] = m
                        if len(cache) > capacity:
                            cache.popitem(last=False)
            for s, r, dist in probes:
                tr.unicast("probe", s, r, dist)
            for s, r in acks:
                tr.unicast("ack", s, r)
        else:
            for h in heads:
                for u in heard[h]:
                    metric[u, h] = tr.d(u, h)
        for h in heads:
            for u in heard[h]:
                tr.unicast("join", u, h)
        for h in heads:
            members[h] = list(heard[h])
            for u in heard[h]:
                latest[u] = h
                if u not in best or metric[u, h] < best[u][1]:
                    best[u] = (h, metric[u, h])

        c = next(draws)
        fresh = []
        if level < max_level:
            electing = [h for h in heads if len([u for u in members[h] if u not in ch]) > 2]
            for h in electing:
                size[h] = len([u for u in members[h] if u not in ch])
                tr.broadcast("command", h, radius[h])
            for h in electing:
                group = [u for u in members[h] if u not in ch]
                es = [tr.e[u] for u in group]
                ms = [metric[u, h] if pamc else max(metric[u, h], 1.0) for u in group]
                ps = [_prob(math.sqrt(size[h]), phi, tr.e[u], es, m, ms) for u, m in zip(group, ms)]
                won = [u for u, p in zip(group, ps) if c[u] < min(1.0, max(0.0, p))]
                if not won:
                    won = [group[max(range(len(group)), key=lambda k: (ps[k], -k))]]
                for u in won:
                    ch[u] = level + 1
                fresh += [(u, h, chain[h] + (size[h],)) for u in won]
        level += 1

    regular = [i for i in alive if i not in ch]
    movers = []
    for u in regular:
        if u not in latest:
            parent[u] = SINK
            continue
        choice = best[u][0] if protocol != "eemc" else latest[u]
        parent[u] = choice
        if choice != latest[u]:
            movers.append(u)
    for u in movers:
        tr.unicast("join", u, parent[u])
    for u in movers:
        tr.unicast("dejoin", u, latest[u])

    hops = {}
    for u in alive:
        hops[u] = ch[u] if u in ch else (1 if parent[u] == SINK else ch[parent[u]] + 1)

    # data phase: members first, then heads deepest level first
    received = {h: 0 for h in ch}
    for u in regular:
        tr.unicast("data", u, parent[u])
        if parent[u] != SINK:
            received[parent[u]] += 1
    for lv in range(max(ch.values()), 0, -1):
        for h in sorted(x for x in ch if ch[x] == lv):
            k = received[h] + 1
            tr.spend(h, E_AGG * DATA * k)
            tr.aggs.append((h, k))
            tr.unicast("data", h, parent[h])
            if parent[h] != SINK:
                received[parent[h]] += 1
    return parent, hops, caches, sink_mrp, table
