"""``simulate``: run a config file (optionally as a sweep) and write CSV/JSON results.

Exit status is 0 on success, 2 for configuration errors and 3 for failures
while simulating or writing results.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings
from pathlib import Path

from .experiments import ConfigError, SweepSpec, emit_csv, emit_json, load_config, run_experiment, sweep

#: overrides the output directory when ``--out`` is not given
OUT_DIR_ENV = "MLCSIM_OUT_DIR"

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="simulate", description=__doc__.splitlines()[0])
    p.add_argument("config", help="key = value configuration file")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override one config key (repeatable)")
    p.add_argument("--out", help=f"output directory (default: ${OUT_DIR_ENV} or the current directory)")
    p.add_argument("--format", choices=("csv", "json", "both"), default="csv")
    p.add_argument("--sweep", metavar="PARAM=V1,V2,...", help="sweep phi, cache_capacity, n or protocol")
    p.add_argument("--per-round", action="store_true", help="include per-round series in the JSON output")
    p.add_argument("-q", "--quiet", action="store_true")
    return p


def _summary_line(value, exp):
    def fmt(x):
        return "censored" if x is None else f"{x:.3f}"

    m = exp.mean
    return (f"{value!s:>10}  fnd={fmt(m['fnd'])}  hnd={fmt(m['hnd'])}  "
            f"overhead={fmt(m['overhead_ratio'])}  hops={fmt(m['average_hops'])}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            cfg = load_config(args.config, args.overrides)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        spec = SweepSpec.parse(args.sweep) if args.sweep else None
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: cannot read {args.config}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(args.out or os.environ.get(OUT_DIR_ENV) or ".")

    def progress(c, seed, res):
        if not args.quiet:
            print(f"{c.protocol} n={c.n} seed={seed}: fnd={res.fnd} hnd={res.hnd}", file=sys.stderr)

    try:
        if spec is None:
            table = [(cfg.protocol, run_experiment(cfg, progress))]
            param = None
        else:
            table = sweep(cfg, spec, progress)
            param = spec.parameter
        if args.format in ("csv", "both"):
            emit_csv(table, out / "results.csv")
        if args.format in ("json", "both"):
            emit_json(table, out / "results.json", parameter=param, per_round=args.per_round)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - any simulation or I/O failure maps to one status
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    if not args.quiet:
        for value, exp in table:
            print(_summary_line(value, exp))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
