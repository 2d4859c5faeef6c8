"""Config files, multi-seed experiments, parameter sweeps and result files."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import statistics
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from .harness import LifetimeResult, SimConfig, run_lifetime
from .model import Field
from .protocols import PROTOCOLS

CSV_HEADER = ("param", "seed", "fnd", "hnd", "overhead_ratio", "avg_hops")
METRICS = ("fnd", "hnd", "overhead_ratio", "average_hops")
PAMC_ONLY = frozenset({"power_levels", "cache_capacity"})
SWEEPABLE = ("phi", "cache_capacity", "n", "protocol")


class ConfigError(ValueError):
    """Bad configuration text; ``line`` is 1-based or ``None`` for overrides."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _pair(text):
    parts = [p for p in text.replace("x", ",").replace("(", "").replace(")", "").split(",") if p.strip()]
    return tuple(float(p) for p in parts)


def _field(text):
    v = _pair(text)
    if len(v) == 2:
        return Field(0.0, 0.0, v[0], v[1])
    if len(v) == 4:
        return Field(*v)
    raise ValueError("expected 'W x H' or 'x0, y0, x1, y1'")


def _sink(text):
    v = _pair(text)
    if len(v) != 2:
        raise ValueError("expected 'x, y'")
    return v


def _protocol(text):
    p = text.strip().lower()
    if p not in PROTOCOLS:
        raise ValueError(f"protocol must be one of {', '.join(PROTOCOLS)}")
    return p


# key -> parser for its value text
KEYS = {
    "protocol": _protocol,
    "n": int,
    "field": _field,
    "sink": _sink,
    "phi": float,
    "power_levels": int,
    "cache_capacity": int,
    "seed": int,
    "seeds": int,
    "initial_energy": float,
    "round_cap": int,
    "max_level": int,
    "e_agg": float,
}


def _apply(values: dict, lines: dict) -> SimConfig:
    try:
        cfg = SimConfig(**values)
    except ValueError as exc:
        # pin the message to the offending key's line when we can tell
        msg = str(exc)
        line = lines.get(msg.split()[0]) if msg else None
        raise ConfigError(msg, line) from None
    if cfg.protocol != "pamc":
        ignored = sorted(PAMC_ONLY & set(values))
        if ignored:
            warnings.warn(f"{', '.join(ignored)} only affect pamc and are ignored for {cfg.protocol}",
                          stacklevel=3)
    return cfg


def _parse_pairs(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, _, val = (s.strip() for s in line.partition("="))
        yield key, val, lineno


def _convert(key, val, line):
    if key not in KEYS:
        raise ConfigError(f"unknown key {key!r}", line)
    if not val:
        raise ConfigError(f"missing value for {key!r}", line)
    try:
        return KEYS[key](val)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {exc}", line) from None


def parse_config(text: str, overrides=()) -> SimConfig:
    """Build a :class:`SimConfig` from ``key = value`` lines.

    Omitted keys keep their defaults.  ``overrides`` are extra ``key=value``
    strings applied after the file (as given on the command line).
    """
    values, lines = {}, {}
    for key, val, lineno in _parse_pairs(text):
        values[key] = _convert(key, val, lineno)
        lines[key] = lineno
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, _, val = (s.strip() for s in item.partition("="))
        values[key] = _convert(key, val, None)
        lines[key] = None
    return _apply(values, lines)


def load_config(path, overrides=()) -> SimConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"), overrides)


@dataclass
class ExperimentResult:
    """Per-seed lifetimes of one configuration plus their mean and median."""

    config: SimConfig
    runs: list  # (seed, LifetimeResult)
    mean: dict = field(default_factory=dict)
    median: dict = field(default_factory=dict)

    def values(self, metric: str) -> list:
        return [getattr(r, metric) for _, r in self.runs]


def _summaries(runs):
    mean, median = {}, {}
    for m in METRICS:
        xs = [getattr(r, m) for _, r in runs if getattr(r, m) is not None]
        mean[m] = statistics.fmean(xs) if xs else None
        median[m] = statistics.median(xs) if xs else None
    return mean, median


def run_experiment(config: SimConfig, progress=None) -> ExperimentResult:
    """Lifetimes for seeds ``seed .. seed + seeds - 1``; censored values stay out of the summaries."""
    runs = []
    for s in range(config.seed, config.seed + config.seeds):
        res = run_lifetime(dataclasses.replace(config, seed=s))
        runs.append((s, res))
        if progress:
            progress(config, s, res)
    mean, median = _summaries(runs)
    return ExperimentResult(config, runs, mean, median)


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple

    def __post_init__(self):
        if self.parameter not in SWEEPABLE:
            raise ConfigError(f"cannot sweep {self.parameter!r}; choose from {', '.join(SWEEPABLE)}")
        if not self.values:
            raise ConfigError("a sweep needs at least one value")
        object.__setattr__(self, "values", tuple(self.values))
        for v in self.values:
            try:
                SimConfig(**{self.parameter: v})
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{self.parameter}={v!r}: {exc}") from None

    @classmethod
    def parse(cls, text: str) -> "SweepSpec":
        """``'phi=0.1,0.2'`` style."""
        if "=" not in text:
            raise ConfigError(f"sweep {text!r} is not param=v1,v2,...")
        key, _, vals = (s.strip() for s in text.partition("="))
        if key not in SWEEPABLE:
            raise ConfigError(f"cannot sweep {key!r}; choose from {', '.join(SWEEPABLE)}")
        items = [v.strip() for v in vals.split(",") if v.strip()]
        return cls(key, tuple(_convert(key, v, None) for v in items))


def sweep(config: SimConfig, spec: SweepSpec, progress=None) -> list:
    """One experiment per value, all on the same seed set; rows are ``(value, ExperimentResult)``."""
    rows = []
    for v in spec.values:
        try:
            cfg = dataclasses.replace(config, **{spec.parameter: v})
        except ValueError as exc:
            raise ConfigError(f"{spec.parameter}={v}: {exc}") from None
        rows.append((v, run_experiment(cfg, progress)))
    return rows


def _cell(x):
    if x is None:
        return ""
    return repr(float(x)) if isinstance(x, float) else str(x)


def csv_text(table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for value, exp in table:
        for seed, r in exp.runs:
            w.writerow([_cell(value), seed, _cell(r.fnd), _cell(r.hnd),
                        _cell(r.overhead_ratio), _cell(r.average_hops)])
    return buf.getvalue()


def _write(path, text):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def emit_csv(table, path) -> Path:
    """One row per (value, seed); censored metrics are left empty."""
    return _write(path, csv_text(table))


def read_csv(path) -> list:
    """Rows of an emitted CSV with numbers restored (``None`` for blanks)."""

    def num(s, kind):
        return None if s == "" else kind(s)

    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return [dict(param=r["param"], seed=int(r["seed"]), fnd=num(r["fnd"], int), hnd=num(r["hnd"], int),
                 overhead_ratio=num(r["overhead_ratio"], float), avg_hops=num(r["avg_hops"], float))
            for r in rows]


def _series(result: LifetimeResult):
    return [dict(round=r.round, control_tx=r.control_tx, data_tx=r.data_tx, deaths=r.deaths,
                 alive=r.alive, residual_energy=r.residual_energy,
                 overhead_ratio=r.overhead_ratio, average_hops=r.average_hops)
            for r in result.rounds]


def json_payload(table, parameter=None, per_round=False) -> dict:
    records, summary = [], []
    for value, exp in table:
        for seed, r in exp.runs:
            rec = dict(param=value, seed=seed, fnd=r.fnd, hnd=r.hnd,
                       overhead_ratio=r.overhead_ratio, avg_hops=r.average_hops)
            if per_round:
                rec["series"] = _series(r)
            records.append(rec)
        summary.append(dict(param=value, mean=exp.mean, median=exp.median))
    return dict(parameter=parameter, records=records, summary=summary)


def emit_json(table, path, parameter=None, per_round=False) -> Path:
    text = json.dumps(json_payload(table, parameter, per_round), indent=2, sort_keys=True) + "\n"
    return _write(path, text)
