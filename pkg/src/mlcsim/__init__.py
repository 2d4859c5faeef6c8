"""Multi-level clustering simulator for wireless sensor networks (EEMC, LAMC, PAMC)."""

from .election import ElectionParams, ElectionTotals, broadcast_range, level1_probability, levelj_probability
from .experiments import (ConfigError, ExperimentResult, SweepSpec, emit_csv, emit_json, parse_config,
                          run_experiment, sweep)
from .harness import LifetimeResult, RoundReport, SimConfig, average_hops, overhead_ratio, run_lifetime, run_round
from .model import SINK, EnergyModel, Field, Point, World, deploy, rx_cost, tx_cost
from .power import MrpCache, PowerTable, build_power_table, discover_mrp, min_level_for_distance
from .protocols import PROTOCOLS, ProtocolParams, Topology, operate, setup_eemc, setup_lamc, setup_pamc
from .radio import MessageLedger, Radio

__all__ = [
    "PROTOCOLS", "SINK", "ConfigError", "ElectionParams", "ElectionTotals", "EnergyModel", "ExperimentResult",
    "Field", "LifetimeResult", "MessageLedger", "MrpCache", "Point", "PowerTable", "ProtocolParams", "Radio",
    "RoundReport", "SimConfig", "SweepSpec", "Topology", "World", "average_hops", "broadcast_range",
    "build_power_table", "deploy", "discover_mrp", "emit_csv", "emit_json", "level1_probability",
    "levelj_probability", "min_level_for_distance", "operate", "overhead_ratio", "parse_config",
    "run_experiment", "run_lifetime", "run_round", "rx_cost", "setup_eemc", "setup_lamc", "setup_pamc",
    "sweep", "tx_cost",
]
