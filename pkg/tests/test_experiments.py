import json
import warnings

import pytest

from mlcsim.experiments import (CSV_HEADER, ConfigError, SweepSpec, csv_text, emit_csv, emit_json, parse_config,
                                read_csv, run_experiment, sweep)
from mlcsim.harness import SimConfig
from mlcsim.model import Field


def test_empty_config_gives_defaults():
    cfg = parse_config("")
    assert cfg == SimConfig()
    assert (cfg.n, cfg.field, cfg.sink, cfg.initial_energy, cfg.cache_capacity) == (
        100, Field(0, 0, 1000, 1000), (500.0, 500.0), 0.1, 10)


def test_parse_values_and_comments():
    cfg = parse_config("""
        # a comment
        protocol = pamc   # trailing comment
        cache_capacity = 20
        field = 0, 0, 400, 300
        sink = (200, 150)
        seeds = 3
    """)
    assert cfg.protocol == "pamc" and cfg.cache_capacity == 20
    assert cfg.field == Field(0, 0, 400, 300) and cfg.sink == (200.0, 150.0)
    assert parse_config("field = 500 x 200").field == Field(0, 0, 500, 200)


@pytest.mark.parametrize("text,line", [
    ("n = 10\nphi = 1.5", 2),
    ("bogus = 1", 1),
    ("\n\nn 10", 3),
    ("n = ten", 1),
    ("protocol = leach", 1),
    ("n = 5\nseeds = 0", 2),
])
def test_errors_name_the_line(text, line):
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert err.value.line == line
    assert f"line {line}" in str(err.value)


def test_pamc_only_keys_warn_for_other_protocols():
    with pytest.warns(UserWarning, match="cache_capacity"):
        parse_config("protocol = lamc\ncache_capacity = 5")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        parse_config("protocol = pamc\ncache_capacity = 5")


def test_overrides_apply_after_file():
    cfg = parse_config("n = 50", overrides=["n=70", "phi = 0.3"])
    assert (cfg.n, cfg.phi) == (70, 0.3)
    with pytest.raises(ConfigError):
        parse_config("", overrides=["n"])


def test_single_seed_mean_is_the_run():
    exp = run_experiment(SimConfig(n=30, seeds=1, seed=5))
    (seed, run), = exp.runs
    assert seed == 5
    assert exp.mean["hnd"] == run.hnd == exp.median["hnd"]


def test_sweep_pairs_seeds():
    spec = SweepSpec.parse("phi=0.2,0.8")
    rows = sweep(SimConfig(protocol="lamc", n=30, seeds=2, seed=10), spec)
    assert [v for v, _ in rows] == [0.2, 0.8]
    assert [[s for s, _ in exp.runs] for _, exp in rows] == [[10, 11], [10, 11]]
    assert rows[0][1].config.phi == 0.2


def test_sweep_spec_validation():
    assert SweepSpec.parse("cache_capacity=1,5,10,20").values == (1, 5, 10, 20)
    assert SweepSpec.parse("protocol=eemc,pamc").values == ("eemc", "pamc")
    assert len(SweepSpec.parse("n=100,200,300,400,500").values) == 5
    with pytest.raises(ConfigError):
        SweepSpec.parse("round_cap=1,2")
    with pytest.raises(ConfigError):
        SweepSpec.parse("phi=")
    with pytest.raises(ConfigError):
        SweepSpec.parse("phi=0.5,2.0")


def test_csv_roundtrip(tmp_path):
    table = sweep(SimConfig(n=25, seeds=2), SweepSpec("protocol", ("eemc", "pamc")))
    path = emit_csv(table, tmp_path / "out" / "r.csv")
    raw = path.read_bytes()
    assert b"\r" not in raw
    assert raw.decode().splitlines()[0] == ",".join(CSV_HEADER)
    rows = read_csv(path)
    assert len(rows) == 4
    for row, (value, seed, run) in zip(rows, [(v, s, r) for v, e in table for s, r in e.runs]):
        assert row == dict(param=value, seed=seed, fnd=run.fnd, hnd=run.hnd,
                           overhead_ratio=run.overhead_ratio, avg_hops=run.average_hops)


def test_empty_table_is_header_only(tmp_path):
    assert csv_text([]) == ",".join(CSV_HEADER) + "\n"


def test_censored_cells_are_blank(tmp_path):
    table = [("lamc", run_experiment(SimConfig(n=10, seeds=1, initial_energy=1e5, round_cap=3)))]
    line = csv_text(table).splitlines()[1]
    assert line.startswith("lamc,0,,,")
    assert read_csv(emit_csv(table, tmp_path / "c.csv"))[0]["hnd"] is None


def test_json_series(tmp_path):
    table = [("lamc", run_experiment(SimConfig(n=20, seeds=2)))]
    data = json.loads(emit_json(table, tmp_path / "r.json", per_round=True).read_text())
    for rec in data["records"]:
        assert len(rec["series"]) == rec["hnd"]
    assert data["summary"][0]["mean"]["hnd"] == pytest.approx(sum(r["hnd"] for r in data["records"]) / 2)


def test_unwritable_path_is_reported(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError, match="file"):
        emit_csv([], blocker / "r.csv")
