import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mlcsim.model import World


class ScriptedRng:
    """Stands in for a Generator: hands out pre-set coin vectors in order."""

    def __init__(self, coins):
        self.coins = [np.asarray(c, dtype=float) for c in coins]
        self.calls = 0

    def random(self, n):
        c = self.coins[self.calls]
        self.calls += 1
        assert len(c) == n
        return c.copy()


def scripted_world(pos, energy=1.0, sink=(500.0, 500.0)):
    pos = np.asarray(pos, dtype=float)
    energy = np.broadcast_to(np.asarray(energy, dtype=float), (len(pos),))
    return World(pos, energy, sink)


# five-node layouts; every round has enough coins for the level cap
LAYOUTS = {
    "line": [(100, 500), (300, 500), (450, 500), (650, 520), (900, 480)],
    "cluster": [(480, 470), (520, 530), (530, 470), (470, 520), (505, 505)],
    "spread": [(50, 60), (950, 80), (500, 900), (200, 700), (820, 640)],
    "pair_of_groups": [(200, 200), (230, 210), (210, 240), (800, 790), (770, 820)],
    # one far node stretches the radius so a head near the sink gets three members
    "hub": [(60, 500), (480, 500), (520, 510), (505, 470), (495, 530)],
}


@pytest.fixture
def rng_factory():
    return ScriptedRng


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS.values():
            terminalreporter.write_line(line)
