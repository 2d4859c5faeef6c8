"""Cluster-head election probabilities and advertisement ranges.

All probability helpers accept scalars or numpy arrays for the per-node
quantities, so a whole cluster can be evaluated in one call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: distances are floored here before taking reciprocals
MIN_DISTANCE = 1.0


@dataclass(frozen=True)
class ElectionTotals:
    total_energy: float
    total_reciprocal_metric: float
    member_count: int

    @classmethod
    def of(cls, energies, reciprocal_metrics) -> "ElectionTotals":
        energies = np.asarray(energies, dtype=float)
        return cls(float(energies.sum()), float(np.sum(reciprocal_metrics)), len(energies))


@dataclass(frozen=True)
class ElectionParams:
    phi: float = 0.8
    n_ch1_opt: int = 10

    def __post_init__(self):
        if not 0.0 <= self.phi <= 1.0:
            raise ValueError(f"phi must lie in [0, 1], got {self.phi}")
        if self.n_ch1_opt < 1:
            raise ValueError("n_ch1_opt must be at least 1")


def optimal_ch_count(n: int) -> int:
    """Square-root rule for the number of level-1 heads."""
    if n < 1:
        raise ValueError("n must be positive")
    return max(1, round(math.sqrt(n)))


def reciprocal_distance(d):
    return 1.0 / np.maximum(d, MIN_DISTANCE)


def _weighted_share(e_u, metric_u, totals: ElectionTotals, phi: float):
    if totals.total_energy <= 0 or totals.total_reciprocal_metric <= 0 or totals.member_count < 1:
        raise ValueError(f"degenerate election totals: {totals}")
    return (phi * np.asarray(e_u, dtype=float) / totals.total_energy
            + (1.0 - phi) * np.asarray(metric_u, dtype=float) / totals.total_reciprocal_metric)


def level1_probability(e_u, metric_u, totals: ElectionTotals, params: ElectionParams):
    """Raw (unclamped) chance of becoming a level-1 head.

    ``metric_u`` is the reciprocal closeness to the sink: ``1/distance`` for the
    location-aware protocols, ``1/MRP`` for PAMC.
    """
    return params.n_ch1_opt * _weighted_share(e_u, metric_u, totals, params.phi)


def levelj_probability(e_u, metric_u, cluster_totals: ElectionTotals, params: ElectionParams):
    """Raw chance of a member becoming a head one level below its cluster head."""
    if cluster_totals.member_count < 1:
        raise ValueError("empty cluster")
    scale = math.sqrt(cluster_totals.member_count)
    return scale * _weighted_share(e_u, metric_u, cluster_totals, params.phi)


def clamp_probability(p):
    return np.minimum(1.0, np.maximum(0.0, p)) + 0.0


def elect(p, rng: np.random.Generator):
    """Bernoulli draw(s); ``p`` may be a scalar or an array."""
    if np.ndim(p) == 0:
        return bool(rng.random() < p)
    p = np.asarray(p, dtype=float)
    return rng.random(p.shape) < p


def broadcast_range(R: float, n_ch1_opt: int, ancestor_sizes=()) -> float:
    """Advertisement radius of a head given the cluster sizes above it."""
    denom = float(n_ch1_opt)
    for s in ancestor_sizes:
        denom *= s
    return R / math.sqrt(denom)
