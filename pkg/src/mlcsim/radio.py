"""Message accounting: every transmission is debited and logged here.

Messages are processed in the order given.  When nobody can die inside a batch
the debits are applied in one vectorised step; otherwise the batch is replayed
message by message so that a node dying mid-batch stops sending and receiving.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .model import NOBODY, SINK, EnergyModel, World, aggregation_cost, debit, rx_cost, tx_cost

CONTROL_KINDS = frozenset({"beacon", "report", "command", "advert", "join", "dejoin", "probe", "ack"})
DATA_KINDS = frozenset({"data"})


class Message(NamedTuple):
    kind: str
    sender: int
    receivers: tuple
    bits: int
    distance: float


@dataclass
class _Unicasts:
    kind: str
    bits: int
    senders: np.ndarray
    receivers: np.ndarray  # NOBODY where nothing was received
    distances: np.ndarray


@dataclass
class _Broadcast:
    kind: str
    bits: int
    sender: int
    receivers: np.ndarray
    radius: float


class MessageLedger:
    """Tally of control and data transmissions plus the records behind them."""

    def __init__(self):
        self.control_tx = 0
        self.data_tx = 0
        self._entries: list = []
        self._aggregations: list = []

    def __len__(self):
        return self.control_tx + self.data_tx

    def _count(self, kind, m):
        if kind in DATA_KINDS:
            self.data_tx += m
        elif kind in CONTROL_KINDS:
            self.control_tx += m
        else:
            raise ValueError(f"unknown message kind {kind!r}")

    def add_unicasts(self, kind, bits, senders, receivers, distances):
        if len(senders):
            self._count(kind, len(senders))
            self._entries.append(_Unicasts(kind, bits, senders, receivers, distances))

    def add_broadcast(self, kind, bits, sender, receivers, radius):
        self._count(kind, 1)
        self._entries.append(_Broadcast(kind, bits, sender, receivers, radius))

    def add_aggregations(self, nodes, n_signals, bits):
        if len(nodes):
            self._aggregations.append((np.asarray(nodes), np.asarray(n_signals), bits))

    def extend(self, other: "MessageLedger") -> None:
        self.control_tx += other.control_tx
        self.data_tx += other.data_tx
        self._entries.extend(other._entries)
        self._aggregations.extend(other._aggregations)

    def records(self) -> Iterator[Message]:
        for e in self._entries:
            if isinstance(e, _Broadcast):
                yield Message(e.kind, e.sender, tuple(int(r) for r in e.receivers), e.bits, e.radius)
            else:
                for s, r, d in zip(e.senders.tolist(), e.receivers.tolist(), e.distances.tolist()):
                    yield Message(e.kind, s, () if r == NOBODY else (r,), e.bits, d)

    def aggregations(self) -> Iterator[tuple]:
        """``(node, n_signals, bits)`` for every fusion step."""
        for nodes, sig, bits in self._aggregations:
            for i, k in zip(nodes.tolist(), sig.tolist()):
                yield i, k, bits

    def count(self, kind: str) -> int:
        total = 0
        for e in self._entries:
            if e.kind == kind:
                total += 1 if isinstance(e, _Broadcast) else len(e.senders)
        return total

    def debits(self, n: int, model: EnergyModel) -> np.ndarray:
        """Per-node energy implied by the records (sink excluded)."""
        out = np.zeros(n)
        for msg in self.records():
            if msg.sender != SINK:
                out[msg.sender] += tx_cost(msg.bits, msg.distance, model)
            for r in msg.receivers:
                if r != SINK:
                    out[r] += rx_cost(msg.bits, model)
        for i, k, bits in self.aggregations():
            out[i] += aggregation_cost(bits, k, model)
        return out


class Radio:
    """Sends messages on behalf of nodes, charging the energy model."""

    def __init__(self, world: World, model: EnergyModel, ledger: MessageLedger | None = None):
        self.world = world
        self.model = model
        self.ledger = ledger if ledger is not None else MessageLedger()

    def _bits(self, kind):
        return self.model.data_bits if kind in DATA_KINDS else self.model.ctrl_bits

    def unicast(self, kind, senders, receivers, distances=None, bits=None) -> np.ndarray:
        """Point-to-point messages; returns which ones reached a live receiver.

        ``receivers`` may hold ``SINK`` or ``NOBODY`` (a probe nobody answers, in
        which case ``distances`` must be given).  Messages from dead senders are
        dropped.
        """
        w = self.world
        bits = self._bits(kind) if bits is None else bits
        senders = np.asarray(senders, dtype=int).ravel()
        m = len(senders)
        receivers = np.asarray(receivers, dtype=int)
        receivers = np.full(m, int(receivers)) if receivers.ndim == 0 else receivers.ravel()
        if distances is None:
            distances = _pair_distances(w, senders, receivers)
        else:
            distances = np.asarray(distances, dtype=float)
            distances = np.full(m, float(distances)) if distances.ndim == 0 else distances.ravel()
        delivered = np.zeros(m, dtype=bool)
        if not m:
            return delivered

        from_node = senders >= 0
        keep = ~from_node | w.alive[np.where(from_node, senders, 0)]
        tx = tx_cost(bits, distances, self.model)
        to_node = receivers >= 0
        rx_ok = to_node & w.alive[np.where(to_node, receivers, 0)]
        rx = rx_cost(bits, self.model)

        pay = keep & from_node
        s_idx = senders[pay]
        r_idx = receivers[keep & rx_ok]
        idx = np.concatenate([s_idx, r_idx])
        cost = np.concatenate([tx[pay], np.full(len(r_idx), rx)])
        touched, inv = np.unique(idx, return_inverse=True)
        total = np.bincount(inv, cost, minlength=len(touched))
        if np.all(w.energy[touched] > total):
            w.energy[touched] -= total
            delivered = keep & (rx_ok | (receivers == SINK))
            rec = np.where(delivered, receivers, NOBODY)
            self.ledger.add_unicasts(kind, bits, senders[keep], rec[keep], distances[keep])
            return delivered

        # someone dies inside this batch: fall back to strict message order
        sent, rec = [], []
        for i, (s, r) in enumerate(zip(senders.tolist(), receivers.tolist())):
            if s != SINK:
                if not w.alive[s]:
                    continue
                debit(w, s, float(tx[i]))
            got = r == SINK or (r >= 0 and bool(w.alive[r]))
            if r >= 0 and got:
                debit(w, r, rx)
            delivered[i] = got
            sent.append(i)
            rec.append(r if got else NOBODY)
        sent = np.asarray(sent, dtype=int)
        self.ledger.add_unicasts(kind, bits, senders[sent], np.asarray(rec, dtype=int), distances[sent])
        return delivered

    def broadcast(self, kind, sender, radius, bits=None) -> np.ndarray:
        """One omnidirectional transmission; returns the ids of live nodes strictly inside ``radius``."""
        w = self.world
        bits = self._bits(kind) if bits is None else bits
        if sender != SINK and not w.alive[sender]:
            return np.empty(0, dtype=int)
        row = w.dist_sink if sender == SINK else w.dist[sender]
        inside = w.alive & (row < radius)
        if sender != SINK:
            inside[sender] = False
        receivers = np.flatnonzero(inside)
        tx = 0.0 if sender == SINK else tx_cost(bits, radius, self.model)
        rx = rx_cost(bits, self.model)
        if (sender == SINK or w.energy[sender] - tx > 0) and np.all(w.energy[receivers] - rx > 0):
            if sender != SINK:
                w.energy[sender] -= tx
            w.energy[receivers] -= rx
        else:
            if sender != SINK:
                debit(w, sender, tx)
            for r in receivers.tolist():
                debit(w, r, rx)
        self.ledger.add_broadcast(kind, bits, sender, receivers, float(radius))
        return receivers

    def broadcast_many(self, kind, senders, radii, bits=None) -> list:
        """Several broadcasts in order; returns the receiver ids of each one."""
        w = self.world
        bits = self._bits(kind) if bits is None else bits
        senders = np.asarray(senders, dtype=int)
        radii = np.asarray(radii, dtype=float)
        if not len(senders):
            return []
        if np.any(senders < 0):
            return [self.broadcast(kind, s, r, bits) for s, r in zip(senders.tolist(), radii.tolist())]
        inside = (w.dist[senders] < radii[:, None]) & w.alive
        inside[np.arange(len(senders)), senders] = False
        ok = w.alive[senders]
        inside[~ok] = False
        tx = tx_cost(bits, radii, self.model)
        rx = rx_cost(bits, self.model)
        total = inside.sum(0) * rx
        np.add.at(total, senders[ok], tx[ok])
        touched = np.flatnonzero(total)
        if not np.all(w.energy[touched] > total[touched]):
            return [self.broadcast(kind, s, r, bits) for s, r in zip(senders.tolist(), radii.tolist())]
        w.energy[touched] -= total[touched]
        out = []
        for k, (s, r) in enumerate(zip(senders.tolist(), radii.tolist())):
            if not ok[k]:
                out.append(np.empty(0, dtype=int))
                continue
            receivers = np.flatnonzero(inside[k])
            self.ledger.add_broadcast(kind, bits, s, receivers, r)
            out.append(receivers)
        return out

    def aggregate(self, nodes, n_signals, bits=None) -> np.ndarray:
        """Charge data fusion at each node; returns which nodes survived it."""
        w = self.world
        bits = self.model.data_bits if bits is None else bits
        requested = np.asarray(nodes, dtype=int)
        live = w.alive[requested]
        nodes, n_signals = requested[live], np.asarray(n_signals, dtype=int)[live]
        cost = aggregation_cost(bits, n_signals, self.model) if len(nodes) else np.empty(0)
        if np.all(w.energy[nodes] - cost > 0):
            w.energy[nodes] -= cost
        else:
            for i, c in zip(nodes.tolist(), np.atleast_1d(cost).tolist()):
                debit(w, i, c)
        self.ledger.add_aggregations(nodes, n_signals, bits)
        return w.alive[requested]


def _pair_distances(w: World, senders, receivers) -> np.ndarray:
    if np.any(receivers == NOBODY):
        raise ValueError("distances are required for messages without a receiver")
    s_sink, r_sink = senders == SINK, receivers == SINK
    d = w.dist[np.where(s_sink, 0, senders), np.where(r_sink, 0, receivers)]
    d = np.where(r_sink, w.dist_sink[np.where(s_sink, 0, senders)], d)
    d = np.where(s_sink, w.dist_sink[np.where(r_sink, 0, receivers)], d)
    return np.where(s_sink & r_sink, 0.0, d)

