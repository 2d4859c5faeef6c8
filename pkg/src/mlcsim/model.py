"""Radio energy model, geometry and the node population shared by all protocols."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

#: pseudo node id of the base station
SINK = -1
#: pseudo node id meaning "no receiver"
NOBODY = -2


class DeadNodeError(RuntimeError):
    """Raised when a dead node is asked to spend energy."""


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite coordinates: ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y


@dataclass(frozen=True)
class Field:
    """Axis aligned deployment rectangle."""

    x0: float = 0.0
    y0: float = 0.0
    x1: float = 1000.0
    y1: float = 1000.0

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError(f"empty field: {self}")

    def contains(self, p) -> bool:
        x, y = p
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1


@dataclass(frozen=True)
class EnergyModel:
    """First order radio model.

    Defaults: 50 nJ/bit electronics, 10 pJ/bit/m^2 amplifier, 500 bit data and
    10 bit control packets.  ``e_agg`` is the per-bit per-signal fusion cost.
    """

    e_elec: float = 50e-9
    eps_amp: float = 10e-12
    e_agg: float = 5e-9
    data_bits: int = 500
    ctrl_bits: int = 10

    def __post_init__(self):
        for name in ("e_elec", "eps_amp", "e_agg", "data_bits", "ctrl_bits"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


def distance(a, b) -> float:
    ax, ay = a
    bx, by = b
    return math.hypot(ax - bx, ay - by)


def tx_cost(k, d, m: EnergyModel):
    """Energy to transmit ``k`` bits over ``d`` metres (scalar or array ``d``)."""
    d = np.asarray(d, dtype=float) if not isinstance(d, (int, float)) else d
    if np.any(np.less(d, 0)):
        raise ValueError("negative transmission distance")
    return m.e_elec * k + m.eps_amp * k * d * d


def rx_cost(k, m: EnergyModel):
    return m.e_elec * k


def aggregation_cost(k, n_signals, m: EnergyModel):
    if np.any(np.less(n_signals, 1)):
        raise ValueError("aggregation needs at least one signal")
    return m.e_agg * k * n_signals


class Role(enum.Enum):
    REGULAR = "regular"
    CLUSTER_HEAD = "cluster_head"
    DEAD = "dead"


@dataclass(frozen=True)
class Node:
    """Read-only snapshot of one sensor."""

    id: int
    pos: Point
    energy: float
    role: Role
    level: int = 0


@dataclass
class World:
    """Array-backed node population plus the sink.

    ``ch_level`` holds the current round's role: 0 for regular nodes, ``j`` for a
    level-``j`` cluster head.  PAMC state that outlives a round (the per-node MRP
    caches and the lifetime sink MRP) is kept here too.
    """

    pos: np.ndarray
    energy: np.ndarray
    sink: np.ndarray
    field: Field = field(default_factory=Field)
    round: int = 0
    alive: np.ndarray = None
    ch_level: np.ndarray = None
    caches: list | None = None
    sink_mrp: np.ndarray | None = None
    death_round: np.ndarray = None
    power_table: object = None

    def __post_init__(self):
        self.pos = np.asarray(self.pos, dtype=float).reshape(-1, 2)
        self.energy = np.asarray(self.energy, dtype=float).copy()
        self.sink = np.asarray(tuple(self.sink), dtype=float)
        n = len(self.pos)
        if self.energy.shape != (n,):
            raise ValueError("energy and positions disagree in length")
        if self.alive is None:
            self.alive = self.energy > 0
        if self.ch_level is None:
            self.ch_level = np.zeros(n, dtype=int)
        if self.death_round is None:
            self.death_round = np.where(self.alive, -1, 0)
        diff = self.pos[:, None, :] - self.pos[None, :, :]
        self.dist = np.sqrt((diff**2).sum(-1))
        self.dist_sink = np.sqrt(((self.pos - self.sink) ** 2).sum(-1))

    def __len__(self):
        return len(self.pos)

    @property
    def n_alive(self) -> int:
        return int(self.alive.sum())

    def alive_ids(self) -> np.ndarray:
        return np.flatnonzero(self.alive)

    def node(self, i: int) -> Node:
        if not self.alive[i]:
            role = Role.DEAD
        elif self.ch_level[i] > 0:
            role = Role.CLUSTER_HEAD
        else:
            role = Role.REGULAR
        return Node(int(i), Point(*self.pos[i]), float(self.energy[i]), role, int(self.ch_level[i]))

    @property
    def nodes(self) -> list[Node]:
        return [self.node(i) for i in range(len(self))]

    def position(self, i: int) -> np.ndarray:
        return self.sink if i == SINK else self.pos[i]

    def pair_distance(self, a: int, b: int) -> float:
        if a == SINK:
            return 0.0 if b == SINK else float(self.dist_sink[b])
        if b == SINK:
            return float(self.dist_sink[a])
        return float(self.dist[a, b])

    def total_energy(self) -> float:
        return float(self.energy.sum())

    def copy(self) -> "World":
        w = World(self.pos, self.energy, self.sink, self.field, self.round,
                  self.alive.copy(), self.ch_level.copy(), None,
                  None if self.sink_mrp is None else self.sink_mrp.copy(),
                  self.death_round.copy(), self.power_table)
        if self.caches is not None:
            w.caches = [c.copy() for c in self.caches]
        return w


def deploy(n: int, field: Field = Field(), seed: int = 0, *, sink=(500.0, 500.0),
           initial_energy: float = 0.1) -> World:
    """Scatter ``n`` identical nodes uniformly over ``field``.

    The result depends only on ``(n, field, seed, sink, initial_energy)``.
    """
    if n < 1:
        raise ValueError("need at least one node")
    rng = np.random.default_rng(seed)
    xs = rng.uniform(field.x0, field.x1, n)
    ys = rng.uniform(field.y0, field.y1, n)
    return World(np.column_stack([xs, ys]), np.full(n, float(initial_energy)), sink, field)


def network_radius(world: World) -> float:
    """Largest sink distance over the alive nodes."""
    if not world.alive.any():
        raise ValueError("no alive nodes")
    return float(world.dist_sink[world.alive].max())


def debit(world: World, i: int, cost: float) -> bool:
    """Charge ``cost`` joules to node ``i``; returns whether it is still alive.

    Energy is clamped at zero and the node is marked dead once it reaches it.
    The sink has unlimited energy.
    """
    if i == SINK:
        return True
    if not world.alive[i]:
        raise DeadNodeError(f"node {i} is dead")
    e = world.energy[i] - cost
    if e <= 0:
        world.energy[i] = 0.0
        world.alive[i] = False
        world.death_round[i] = world.round
        return False
    world.energy[i] = e
    return True
