"""Discrete transmit power levels and minimum-reachability-power (MRP) discovery."""

from __future__ import annotations

import bisect
import functools
import math
from collections import OrderedDict
from dataclasses import dataclass
from typing import Hashable, NamedTuple

import numpy as np


class UnreachableError(ValueError):
    pass


@dataclass(frozen=True)
class PowerTable:
    """Level ``i`` (1-based) reaches ``ranges[i - 1]`` metres."""

    ranges: tuple

    def __post_init__(self):
        r = np.asarray(self.ranges, dtype=float)
        if len(r) < 1 or np.any(r <= 0) or np.any(np.diff(r) <= 0):
            raise ValueError(f"ranges must be positive and strictly ascending: {self.ranges}")

    @property
    def levels(self) -> int:
        return len(self.ranges)

    @property
    def max_range(self) -> float:
        return self.ranges[-1]

    def range_of(self, level: int) -> float:
        return self.ranges[level - 1]


def build_power_table(r_max: float, levels: int = 6) -> PowerTable:
    """Linear partition of ``(0, r_max]`` into ``levels`` equal steps."""
    if levels < 2 or not r_max > 0:
        raise ValueError("need levels >= 2 and r_max > 0")
    # the top level is pinned to r_max so it covers exactly the intended radius
    return PowerTable(tuple(r_max * i / levels for i in range(1, levels)) + (float(r_max),))


def min_level_for_distance(table: PowerTable, d: float) -> int:
    if d < 0:
        raise ValueError("negative distance")
    if d > table.max_range:
        raise UnreachableError(f"{d:.1f} m is beyond the top power level ({table.max_range:.1f} m)")
    # smallest i with R_i >= d
    return bisect.bisect_left(table.ranges, d) + 1


def covering_level(table: PowerTable, d: float) -> int:
    """Like :func:`min_level_for_distance` but saturating at the top level."""
    return table.levels if d > table.max_range else min_level_for_distance(table, d)


class MrpCache:
    """Bounded least-recently-used map from destination id to power level."""

    def __init__(self, capacity: int = 10):
        if capacity < 0:
            raise ValueError("capacity must be non-negative")
        self.capacity = capacity
        self._entries: OrderedDict = OrderedDict()

    def __len__(self):
        return len(self._entries)

    def __contains__(self, key):
        return key in self._entries

    def keys(self) -> list:
        """Keys from least to most recently used."""
        return list(self._entries)

    def lookup(self, key: Hashable):
        level = self._entries.get(key)
        if level is not None:
            self._entries.move_to_end(key)
        return level

    def insert(self, key: Hashable, level: int) -> None:
        if self.capacity == 0:
            return
        if key in self._entries:
            self._entries.move_to_end(key)
        self._entries[key] = level
        if len(self._entries) > self.capacity:
            self._entries.popitem(last=False)

    def discard(self, key: Hashable) -> None:
        self._entries.pop(key, None)

    def copy(self) -> "MrpCache":
        c = MrpCache(self.capacity)
        c._entries = self._entries.copy()
        return c


def cache_insert(cache: MrpCache, key, level: int) -> None:
    cache.insert(key, level)


def cache_lookup(cache: MrpCache, key):
    return cache.lookup(key)


class MrpResult(NamedTuple):
    level: int
    probes: int
    acks: int
    #: power levels probed, in transmission order
    probe_levels: tuple = ()


def discover_mrp(src, dst, table: PowerTable, cache: MrpCache | None = None, key=None,
                 *, dst_alive: bool = True, distance: float | None = None) -> MrpResult:
    """Find the lowest power level at which ``dst`` acknowledges ``src``.

    A cache hit costs nothing.  On a miss the prober walks down from the top
    level, one probe per level, until a probe goes unanswered or level 1 is
    acknowledged; the lowest acknowledged level is cached under ``key``.
    Entries for dead destinations are dropped; a dead node never acknowledges.
    ``distance`` overrides the separation computed from ``src`` and ``dst``.
    """
    if not dst_alive:
        if cache is not None and key is not None:
            cache.discard(key)
        raise UnreachableError(f"destination {key} is dead")
    if cache is not None and key is not None:
        hit = cache.lookup(key)
        if hit is not None:
            return MrpResult(hit, 0, 0)
    if distance is None:
        distance = math.hypot(src[0] - dst[0], src[1] - dst[1])
    mrp = min_level_for_distance(table, distance)
    probed = probe_plan(table.levels, mrp)
    if cache is not None and key is not None:
        cache.insert(key, mrp)
    return MrpResult(mrp, len(probed), len(probed) - (mrp > 1), probed)


@functools.lru_cache(maxsize=None)
def probe_plan(levels: int, mrp: int) -> tuple:
    """Levels probed by a top-down descent that stops at the first silent level."""
    return tuple(range(levels, max(mrp - 1, 1) - 1, -1))


def trmrp(levels) -> float:
    """Sum of reciprocal power levels."""
    levels = np.asarray(levels, dtype=float)
    if np.any(levels < 1):
        raise ValueError("power levels start at 1")
    return float(np.sum(1.0 / levels))
