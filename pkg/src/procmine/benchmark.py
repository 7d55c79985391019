"""Benchmark suites over both engines, reported as CSV.

Suites mirror the classic experiment classes: bulk load across dataset
sizes, per-step execution time, read/write split, disk usage with and
without compression, batch vs. single-record insertion. Sizes default to
the full-scale sweeps divided by a scale factor so the whole run fits on
a laptop. Timings are wall clock around engine calls only; every trial
runs on a fresh table directory and each reported value is the mean of
``repetitions`` trials.
"""

from __future__ import annotations

import csv
import itertools
import shutil
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .eventlog import generate_synthetic_log
from .miner import STEP_TABLES, log_records, mine_with_timings
from .storage import EngineConfig, Record, eventlog_schema, make_engine

FULL_LOAD_SIZES = (100_000, 400_000, 800_000, 1_200_000, 1_600_000, 2_000_000)
FULL_BATCH_SIZES = (30_000, 60_000, 90_000, 130_000, 200_000, 250_000, 500_000)
FULL_BATCH_TOTAL = 500_000
FULL_SINGLE_SIZES = FULL_BATCH_SIZES

SUITES = (
    "load",
    "stepwise",
    "readwrite",
    "disk",
    "disk_compressed",
    "stepwise_compressed",
    "batch",
    "single",
    "inserts_per_sec",
)

#: codec used per engine in compressed suites (deflate either way, different framing)
ENGINE_CODECS = {"row": "zlib", "column": "gzip"}


@dataclass
class BenchmarkConfig:
    suite: str
    sizes: tuple[int, ...] | None = None
    batch_sizes: tuple[int, ...] | None = None
    repetitions: int = 5
    engines: tuple[str, ...] = ("row", "column")
    seed: int = 0
    scale: int = 100
    workdir: Path | None = None

    def __post_init__(self):
        if self.suite not in SUITES:
            raise ValueError(f"unknown suite {self.suite!r}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.sizes is not None and not self.sizes:
            raise ValueError("sizes must be non-empty")
        for engine in self.engines:
            if engine not in ("row", "column"):
                raise ValueError(f"unknown engine {engine!r}")

    def load_sizes(self) -> tuple[int, ...]:
        return self.sizes or tuple(s // self.scale for s in FULL_LOAD_SIZES)

    def insert_batch_sizes(self) -> tuple[int, ...]:
        return self.batch_sizes or tuple(s // self.scale for s in FULL_BATCH_SIZES)

    def batch_total(self) -> int:
        return FULL_BATCH_TOTAL // self.scale

    def single_sizes(self) -> tuple[int, ...]:
        return self.sizes or tuple(s // self.scale for s in FULL_SINGLE_SIZES)

    def stepwise_size(self) -> int:
        return self.sizes[0] if self.sizes else 400_000 // self.scale


@dataclass(frozen=True)
class ReportRow:
    suite: str
    engine: str
    parameter: str
    metric: str
    mean: float
    min: float
    max: float
    unit: str


@dataclass
class BenchmarkReport:
    rows: list[ReportRow] = field(default_factory=list)

    def add(self, suite: str, engine: str, parameter: str, metric: str, values, unit: str):
        values = list(values)
        self.rows.append(
            ReportRow(
                suite,
                engine,
                parameter,
                metric,
                sum(values) / len(values),
                min(values),
                max(values),
                unit,
            )
        )

    def value(self, suite: str, engine: str, parameter: str, metric: str) -> float:
        for row in self.rows:
            if (row.suite, row.engine, row.parameter, row.metric) == (
                suite,
                engine,
                parameter,
                metric,
            ):
                return row.mean
        raise KeyError((suite, engine, parameter, metric))


def write_report_csv(report: BenchmarkReport, path) -> None:
    """Deterministic CSV: fixed column order, rows sorted by (suite, engine, parameter)."""
    rows = sorted(report.rows, key=lambda r: (r.suite, r.engine, r.parameter, r.metric))
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["suite", "engine", "parameter", "metric", "mean", "min", "max", "unit"])
        for r in rows:
            writer.writerow(
                [r.suite, r.engine, r.parameter, r.metric,
                 f"{r.mean:.6f}", f"{r.min:.6f}", f"{r.max:.6f}", r.unit]
            )


def workload_records(n: int, seed: int) -> list[Record]:
    """Exactly n synthetic event records (sequence-model cases of three events)."""
    n_cases = (n + 2) // 3
    log = generate_synthetic_log("sequence", max(n_cases, 1), seed)
    return log_records(log)[:n]


def workload_log(n_records: int, seed: int):
    """A mining workload with branch structure (xor-split cases of three events)."""
    return generate_synthetic_log("xor-split", max(n_records // 3, 2), seed)


_trial_counter = itertools.count()


class _Trial:
    """A fresh engine on a fresh directory, removed afterwards."""

    def __init__(
        self,
        cfg: BenchmarkConfig,
        kind: str,
        compression: str | None = None,
        durability: str | None = None,
    ):
        self.kind = kind
        if cfg.workdir is not None:
            self.root = Path(cfg.workdir) / f"{kind}-{next(_trial_counter)}"
        else:
            self.root = Path(tempfile.mkdtemp(prefix=f"procmine-bench-{kind}-"))
        econf = EngineConfig()
        if compression:
            econf.compression = compression
        if durability:
            econf.durability = durability
        self.engine = make_engine(kind, self.root, econf)

    def __enter__(self):
        return self.engine

    def __exit__(self, *exc):
        self.engine.close()
        shutil.rmtree(self.root, ignore_errors=True)
        return False


def bench_bulk_load(cfg: BenchmarkConfig) -> BenchmarkReport:
    report = BenchmarkReport()
    for size in cfg.load_sizes():
        records = workload_records(size, cfg.seed)
        for kind in cfg.engines:
            times = []
            for _ in range(cfg.repetitions):
                with _Trial(cfg, kind) as engine:
                    table = engine.create_table(eventlog_schema())
                    load = table.bulk_load(records)
                    times.append(load.elapsed)
            report.add("load", kind, str(size), "load_time", times, "s")
    return report


def _stepwise_run(cfg: BenchmarkConfig, suite: str, compressed: bool) -> BenchmarkReport:
    report = BenchmarkReport()
    log = workload_log(cfg.stepwise_size(), cfg.seed)
    nets = {}
    per_engine: dict[str, list[list]] = {}
    for kind in cfg.engines:
        runs = []
        for _ in range(cfg.repetitions):
            codec = ENGINE_CODECS[kind] if compressed else None
            with _Trial(cfg, kind, codec) as engine:
                net, timings = mine_with_timings(log, engine)
                nets[kind] = net
                runs.append(timings)
        per_engine[kind] = runs
    if len(set(nets.values())) > 1:
        raise AssertionError("engines disagreed on the mined net")
    for kind, runs in per_engine.items():
        for step in range(1, 8):
            step_times = [run[step - 1].elapsed for run in runs]
            report.add(suite, kind, str(step), "step_time", step_times, "s")
            if suite == "readwrite":
                reads = [run[step - 1].read_seconds for run in runs]
                writes = [run[step - 1].write_seconds for run in runs]
                report.add(suite, kind, str(step), "read_time", reads, "s")
                report.add(suite, kind, str(step), "write_time", writes, "s")
    return report


def bench_stepwise(cfg: BenchmarkConfig) -> BenchmarkReport:
    return _stepwise_run(cfg, "stepwise", compressed=False)


def bench_stepwise_compressed(cfg: BenchmarkConfig) -> BenchmarkReport:
    return _stepwise_run(cfg, "stepwise_compressed", compressed=True)


def bench_read_write(cfg: BenchmarkConfig) -> BenchmarkReport:
    return _stepwise_run(cfg, "readwrite", compressed=False)


def bench_disk(cfg: BenchmarkConfig, compressed: bool = False) -> BenchmarkReport:
    suite = "disk_compressed" if compressed else "disk"
    report = BenchmarkReport()
    log = workload_log(cfg.stepwise_size(), cfg.seed)
    for kind in cfg.engines:
        usages: dict[int, list[int]] = {s: [] for s in STEP_TABLES}
        ratios: dict[int, list[float]] = {s: [] for s in STEP_TABLES}
        for _ in range(cfg.repetitions):
            codec = ENGINE_CODECS[kind] if compressed else None
            with _Trial(cfg, kind, codec) as engine:
                mine_with_timings(log, engine)
                if kind == "column":
                    for name in STEP_TABLES.values():
                        engine.table(name).flush()
                plain_sizes = {}
                if compressed:
                    with _Trial(cfg, kind) as plain_engine:
                        mine_with_timings(log, plain_engine)
                        if kind == "column":
                            for name in STEP_TABLES.values():
                                plain_engine.table(name).flush()
                        plain_sizes = {
                            step: plain_engine.table(name).disk_usage()
                            for step, name in STEP_TABLES.items()
                        }
                for step, name in STEP_TABLES.items():
                    usage = engine.table(name).disk_usage()
                    usages[step].append(usage)
                    if compressed and usage > 0:
                        ratios[step].append(plain_sizes[step] / usage)
        for step in STEP_TABLES:
            report.add(suite, kind, f"step{step}", "disk_bytes", usages[step], "B")
            if compressed and ratios[step]:
                report.add(suite, kind, f"step{step}", "compression_ratio", ratios[step], "x")
    return report


def bench_insert(cfg: BenchmarkConfig, mode: str) -> BenchmarkReport:
    # real-time insertion runs fully synchronous: a single insert commits per
    # record, a batch commits once per round trip
    report = BenchmarkReport()
    if mode == "batch":
        total = cfg.batch_total()
        records = workload_records(total, cfg.seed)
        for batch_size in cfg.insert_batch_sizes():
            for kind in cfg.engines:
                times = []
                for _ in range(cfg.repetitions):
                    with _Trial(cfg, kind, durability="fsync") as engine:
                        table = engine.create_table(eventlog_schema())
                        t0 = engine.config.clock()
                        table.insert_batch(records, batch_size)
                        times.append(engine.config.clock() - t0)
                report.add("batch", kind, str(batch_size), "batch_time", times, "s")
                report.add(
                    "inserts_per_sec", kind, str(batch_size), "inserts_per_sec",
                    [total / t for t in times], "1/s",
                )
    elif mode == "single":
        for size in cfg.single_sizes():
            records = workload_records(size, cfg.seed)
            for kind in cfg.engines:
                times = []
                for _ in range(cfg.repetitions):
                    with _Trial(cfg, kind, durability="fsync") as engine:
                        table = engine.create_table(eventlog_schema())
                        t0 = engine.config.clock()
                        for record in records:
                            table.insert(record)
                        times.append(engine.config.clock() - t0)
                report.add("single", kind, str(size), "single_insert_time", times, "s")
    else:
        raise ValueError(f"unknown insert mode {mode!r}")
    return report


def run_suite(cfg: BenchmarkConfig) -> BenchmarkReport:
    if cfg.suite == "load":
        return bench_bulk_load(cfg)
    if cfg.suite == "stepwise":
        return bench_stepwise(cfg)
    if cfg.suite == "stepwise_compressed":
        return bench_stepwise_compressed(cfg)
    if cfg.suite == "readwrite":
        return bench_read_write(cfg)
    if cfg.suite == "disk":
        return bench_disk(cfg, compressed=False)
    if cfg.suite == "disk_compressed":
        return bench_disk(cfg, compressed=True)
    if cfg.suite == "batch":
        return bench_insert(cfg, "batch")
    if cfg.suite == "inserts_per_sec":
        return bench_insert(cfg, "batch")
    if cfg.suite == "single":
        return bench_insert(cfg, "single")
    raise ValueError(f"unknown suite {cfg.suite!r}")
