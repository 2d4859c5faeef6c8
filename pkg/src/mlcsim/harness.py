"""Round loop and lifetime metrics (FND, HND, overhead ratio, average hops)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import Field, World, deploy
from .protocols import PROTOCOLS, ProtocolParams, Topology, cluster_setup, operate
from .radio import MessageLedger


@dataclass
class RoundReport:
    round: int
    control_tx: int
    data_tx: int
    hops: np.ndarray
    deaths: int
    alive: int
    residual_energy: float
    ledger: MessageLedger | None = field(default=None, repr=False)
    topology: Topology | None = field(default=None, repr=False)

    @property
    def overhead_ratio(self):
        return overhead_ratio(self)

    @property
    def average_hops(self):
        return average_hops(self)


def overhead_ratio(report) -> float | None:
    """Control transmissions per data transmission; ``None`` when no data moved."""
    if report.data_tx <= 0:
        return None
    return report.control_tx / report.data_tx


def average_hops(report) -> float | None:
    hops = np.asarray(report.hops, dtype=float)
    if not len(hops):
        return None
    return float(hops.mean())


def run_round(world: World, protocol: str, params: ProtocolParams, rng: np.random.Generator | int,
              keep_ledger: bool = False) -> RoundReport:
    """One set-up plus one data phase on ``world``.

    ``rng`` may be a generator or a run seed, in which case the round's coins
    come from :func:`election_rng`.
    """
    alive_before = world.n_alive
    world.round += 1
    if not isinstance(rng, np.random.Generator):
        rng = election_rng(int(rng), world.round)
    ledger = MessageLedger()
    topo, _ = cluster_setup(world, protocol, params, rng, ledger=ledger)
    op = operate(topo, world, params.energy, ledger=ledger)
    return RoundReport(
        round=world.round,
        control_tx=ledger.control_tx,
        data_tx=ledger.data_tx,
        hops=op.hops,
        deaths=alive_before - world.n_alive,
        alive=world.n_alive,
        residual_energy=world.total_energy(),
        ledger=ledger if keep_ledger else None,
        topology=topo if keep_ledger else None,
    )


@dataclass(frozen=True)
class SimConfig:
    """Everything that determines one lifetime run."""

    protocol: str = "lamc"
    n: int = 100
    field: Field = Field()
    sink: tuple = (500.0, 500.0)
    phi: float = 0.8
    power_levels: int = 6
    cache_capacity: int = 10
    seed: int = 0
    seeds: int = 20
    initial_energy: float = 0.1
    round_cap: int = 10_000
    max_level: int = 5
    e_agg: float = 5e-9

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"protocol must be one of {PROTOCOLS}, got {self.protocol!r}")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0.0 <= self.phi <= 1.0:
            raise ValueError(f"phi must lie in [0, 1], got {self.phi}")
        if self.power_levels < 2:
            raise ValueError("power_levels must be at least 2")
        if self.cache_capacity < 0:
            raise ValueError("cache_capacity must be non-negative")
        if self.seeds < 1:
            raise ValueError("seeds must be at least 1")
        if not self.initial_energy > 0:
            raise ValueError("initial_energy must be positive")
        if self.round_cap < 1:
            raise ValueError("round_cap must be at least 1")
        if self.max_level < 1:
            raise ValueError("max_level must be at least 1")
        if not self.e_agg > 0:
            raise ValueError("e_agg must be positive")

    def protocol_params(self) -> ProtocolParams:
        from .model import EnergyModel

        return ProtocolParams(phi=self.phi, max_level=self.max_level, power_levels=self.power_levels,
                              cache_capacity=self.cache_capacity, energy=EnergyModel(e_agg=self.e_agg))

    def world(self) -> World:
        return deploy(self.n, self.field, self.seed, sink=self.sink, initial_energy=self.initial_energy)


@dataclass
class LifetimeResult:
    """``fnd``/``hnd`` are ``None`` when the round cap was hit first (censored)."""

    fnd: int | None
    hnd: int | None
    rounds: list
    overhead_ratio: float | None
    average_hops: float | None
    initial_energy: float = 0.0
    final_energy: float = 0.0

    @property
    def censored(self) -> bool:
        return self.hnd is None


def election_rng(seed: int, round: int) -> np.random.Generator:
    """Coin stream for one round, independent of the deployment stream."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1, round)))


def run_lifetime(config: SimConfig, world: World | None = None, keep_ledgers: bool = False) -> LifetimeResult:
    """Run rounds until at most half the nodes are alive (or the round cap)."""
    world = config.world() if world is None else world
    params = config.protocol_params()
    n = len(world)
    e0 = world.total_energy()
    fnd = hnd = None
    rounds = []
    while world.n_alive * 2 > n and len(rounds) < config.round_cap:
        rep = run_round(world, config.protocol, params, config.seed, keep_ledger=keep_ledgers)
        rounds.append(rep)
        if fnd is None and rep.alive < n:
            fnd = rep.round
        if rep.alive * 2 <= n:
            hnd = rep.round
    ratios = [r for r in map(overhead_ratio, rounds) if r is not None]
    hops = [h for h in map(average_hops, rounds) if h is not None]
    return LifetimeResult(
        fnd=fnd,
        hnd=hnd,
        rounds=rounds,
        overhead_ratio=float(np.mean(ratios)) if ratios else None,
        average_hops=float(np.mean(hops)) if hops else None,
        initial_energy=e0,
        final_energy=world.total_energy(),
    )
