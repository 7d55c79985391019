"""Command-line entry point: gen, mine, footprint, bench.

Exit codes: 0 on success, 1 on internal errors, 2 on usage or input
errors. Diagnostics go to stderr; data outputs go to files or stdout.
"""

from __future__ import annotations

import argparse
import sys
import tempfile
from pathlib import Path

from . import benchmark
from .errors import ProcmineError
from .eventlog import (
    DEFAULT_TS_FORMAT,
    MODEL_VARIANTS,
    SchemaMapping,
    generate_synthetic_log,
    parse_csv,
    write_csv,
)
from .miner import mine
from .petri import export_dot, export_pnml
from .relations import footprint
from .storage import EngineConfig, make_engine


class _UsageError(Exception):
    pass


def _add_mapping_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--map-case", help="CSV column holding the case id")
    parser.add_argument("--map-timestamp", help="CSV column holding the timestamp")
    parser.add_argument("--map-activity", help="CSV column holding the activity")
    parser.add_argument("--map-actor", help="CSV column holding the actor")
    parser.add_argument("--map-status", help="CSV column holding the status")
    parser.add_argument(
        "--timestamp-format", default=DEFAULT_TS_FORMAT,
        help=f"strptime format for timestamps (default {DEFAULT_TS_FORMAT!r})",
    )


def _mapping_from_args(args) -> SchemaMapping:
    custom = any(
        getattr(args, name) for name in ("map_case", "map_timestamp", "map_activity")
    )
    if not custom:
        return SchemaMapping(timestamp_format=args.timestamp_format)
    if not (args.map_case and args.map_timestamp and args.map_activity):
        raise _UsageError("--map-case, --map-timestamp and --map-activity go together")
    return SchemaMapping(
        case_id=args.map_case,
        timestamp=args.map_timestamp,
        activity=args.map_activity,
        actor=args.map_actor,
        status=args.map_status,
        timestamp_format=args.timestamp_format,
    )


def _load_input(args):
    path = Path(args.input)
    if not path.exists():
        raise _UsageError(f"input file {path} does not exist")
    return parse_csv(path, _mapping_from_args(args))


def _engine_config(args) -> EngineConfig:
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            raise _UsageError(f"config file {path} does not exist")
        return EngineConfig.from_file(path)
    return EngineConfig()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="procmine", allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic event log CSV")
    gen.add_argument("--model", required=True, choices=sorted(MODEL_VARIANTS))
    gen.add_argument("--cases", required=True, type=int)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)

    mine_p = sub.add_parser("mine", help="discover a Petri net from a CSV log")
    mine_p.add_argument("--input", required=True)
    mine_p.add_argument("--backend", choices=("row", "column"), default="column")
    mine_p.add_argument("--out", required=True, help="DOT output path")
    mine_p.add_argument("--pnml", help="also write PNML to this path")
    mine_p.add_argument("--compress", action="store_true",
                        help="store engine tables compressed (zlib row / gzip column)")
    mine_p.add_argument("--workdir", help="engine directory (default: temporary)")
    mine_p.add_argument("--config", help="engine key=value config file")
    _add_mapping_flags(mine_p)

    fp = sub.add_parser("footprint", help="print the footprint matrix as CSV")
    fp.add_argument("--input", required=True)
    _add_mapping_flags(fp)

    bench = sub.add_parser("bench", help="run a benchmark suite")
    bench.add_argument("--suite", required=True, choices=benchmark.SUITES)
    bench.add_argument("--scale", type=int, default=100)
    bench.add_argument("--reps", type=int, default=5)
    bench.add_argument("--engines", default="row,column")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--out", required=True)
    bench.add_argument("--workdir")
    return parser


def _cmd_gen(args) -> int:
    if args.cases < 1:
        raise _UsageError("--cases must be >= 1")
    log = generate_synthetic_log(args.model, args.cases, args.seed)
    write_csv(log, args.out)
    return 0


def _cmd_mine(args) -> int:
    log = _load_input(args)
    config = _engine_config(args)
    if args.compress:
        config.compression = benchmark.ENGINE_CODECS[args.backend]
    workdir = args.workdir or tempfile.mkdtemp(prefix="procmine-")
    engine = make_engine(args.backend, workdir, config)
    try:
        net = mine(log, engine)
    finally:
        engine.close()
    Path(args.out).write_text(export_dot(net), encoding="utf-8")
    if args.pnml:
        Path(args.pnml).write_text(export_pnml(net), encoding="utf-8")
    return 0


def _cmd_footprint(args) -> int:
    log = _load_input(args)
    sys.stdout.write(footprint(log).to_csv())
    return 0


def _cmd_bench(args) -> int:
    if args.scale < 1:
        raise _UsageError("--scale must be >= 1")
    cfg = benchmark.BenchmarkConfig(
        suite=args.suite,
        repetitions=args.reps,
        engines=tuple(e.strip() for e in args.engines.split(",") if e.strip()),
        seed=args.seed,
        scale=args.scale,
        workdir=Path(args.workdir) if args.workdir else None,
    )
    report = benchmark.run_suite(cfg)
    benchmark.write_report_csv(report, args.out)
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "mine": _cmd_mine,
    "footprint": _cmd_footprint,
    "bench": _cmd_bench,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return _COMMANDS[args.command](args)
    except (_UsageError, ProcmineError, ValueError) as exc:
        print(f"procmine: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"procmine: internal error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
