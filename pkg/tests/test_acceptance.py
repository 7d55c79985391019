"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Runs the oracle-equivalence, rediscovery, engine-independence, durability,
block-accounting, compression, benchmark-trend and report-format checks
end to end. Slower than the unit modules by design.
"""

import random
import time
from contextlib import contextmanager
from datetime import datetime, timedelta

from procmine.benchmark import (
    BenchmarkConfig,
    BenchmarkReport,
    SUITES,
    run_suite,
    workload_records,
    write_report_csv,
)
from procmine.eventlog import Event, EventLog, generate_synthetic_log
from procmine.miner import STEP_TABLES, mine, mine_with_timings, step4_xl, step5_yl
from procmine.petri import SINK, SOURCE, FlowArc, PetriNet, Place, pair
from procmine.relations import Relation, footprint
from procmine.storage import (
    ALLOWED_COMPRESSED_PAGE_SIZES,
    PAGE_SIZE,
    SEGMENT_CAP,
    ColumnEngine,
    EngineConfig,
    KeyRange,
    RowEngine,
    TableSchema,
    eventlog_schema,
    make_engine,
)
from procmine.storage.compress import Codec, compress_block, decompress_block

from helpers import brute_force_xl, brute_force_yl, l_par_log, l_xor_log, random_log


@contextmanager
def criterion(capsys, number: int, title: str):
    ok = False
    try:
        yield
        ok = True
    finally:
        with capsys.disabled():
            print(f"acceptance criterion {number} ({title}): {'PASS' if ok else 'FAIL'}")


def _internal(set_a, set_b) -> Place:
    return Place("internal", pair(set_a, set_b))


def _expected_net(transitions, yl_pairs, t_i, t_o) -> PetriNet:
    places = {SOURCE, SINK}
    flow = set()
    for set_a, set_b in yl_pairs:
        p = _internal(set_a, set_b)
        places.add(p)
        flow.update(FlowArc(a, p) for a in set_a)
        flow.update(FlowArc(p, b) for b in set_b)
    flow.update(FlowArc(SOURCE, t) for t in t_i)
    flow.update(FlowArc(t, SINK) for t in t_o)
    return PetriNet(frozenset(transitions), frozenset(places), frozenset(flow))


EXPECTED_NETS = {
    "sequence": _expected_net(
        "abc", [({"a"}, {"b"}), ({"b"}, {"c"})], {"a"}, {"c"}
    ),
    "xor-split": _expected_net(
        "abcd", [({"a"}, {"b", "c"}), ({"b", "c"}, {"d"})], {"a"}, {"d"}
    ),
    "and-split": _expected_net(
        "abcd",
        [({"a"}, {"b"}), ({"a"}, {"c"}), ({"b"}, {"d"}), ({"c"}, {"d"})],
        {"a"},
        {"d"},
    ),
}


def _chain_log(n_activities: int) -> EventLog:
    """One long trace over a large alphabet; produces sizable step tables."""
    base = datetime(2014, 6, 1)
    events = [
        Event("c1", base + timedelta(seconds=i), f"{i:06d}", f"t{i:03d}", "u")
        for i in range(n_activities)
    ]
    return EventLog(events)


def test_criterion_1_oracle_equivalence(capsys):
    with criterion(capsys, 1, "miner matches brute-force oracle on 200 random logs"):
        t0 = time.perf_counter()
        for seed in range(200):
            log = random_log(random.Random(seed), max_activities=6, max_traces=20)
            fp = footprint(log)
            xl = step4_xl(fp)
            assert xl == brute_force_xl(fp)
            assert step5_yl(xl) == brute_force_yl(xl)
        assert time.perf_counter() - t0 < 60


def test_criterion_2_rediscovery(capsys, tmp_path):
    with criterion(capsys, 2, "generator models rediscover their expected nets"):
        for i, (model, expected) in enumerate(EXPECTED_NETS.items()):
            log = generate_synthetic_log(model, 40, seed=i)
            engine = ColumnEngine(tmp_path / model)
            assert mine(log, engine) == expected
            engine.close()
        par_engine = RowEngine(tmp_path / "par")
        net = mine(l_par_log(), par_engine)
        assert (len(net.transitions), len(net.places), len(net.flow)) == (5, 6, 14)
        par_engine.close()


def test_criterion_3_engine_independence(capsys, tmp_path):
    with criterion(capsys, 3, "row and column engines mine identical nets"):
        logs = [l_xor_log(), l_par_log(), _chain_log(30)]
        logs += [generate_synthetic_log(m, 50, 1) for m in EXPECTED_NETS]
        logs += [random_log(random.Random(s)) for s in range(40)]
        for i, log in enumerate(logs):
            row = RowEngine(tmp_path / f"r{i}")
            col = ColumnEngine(tmp_path / f"c{i}")
            assert mine(log, row) == mine(log, col)
            row.close()
            col.close()


def test_criterion_4_scan_equivalence(capsys, tmp_path):
    with criterion(capsys, 4, "100k-record scans agree across engines"):
        records = workload_records(100_000, seed=0)
        schema = eventlog_schema()
        row = RowEngine(tmp_path / "row")
        col = ColumnEngine(tmp_path / "col")
        row.create_table(schema).bulk_load(records)
        col.create_table(schema).bulk_load(records)
        case_ids = sorted({r["CaseID"] for r in records})
        rng = random.Random(1)
        for _ in range(50):
            projection = rng.sample(schema.column_names, rng.randint(1, 5))
            low, high = sorted(rng.sample(case_ids, 2))
            predicate = rng.choice(
                [None, KeyRange.equals((low,)), KeyRange(low=(low,), high=(high,))]
            )
            got_row = list(row.table("eventlog").scan(projection, predicate))
            got_col = list(col.table("eventlog").scan(projection, predicate))
            assert got_row == got_col and got_row
        row.close()
        col.close()


def test_criterion_5_durability(capsys, tmp_path):
    with criterion(capsys, 5, "1000 crash schedules lose no acknowledged write"):
        schema = TableSchema(
            name="t", columns=(("k", "string"), ("v", "string")), primary_key=("k",)
        )
        engine = ColumnEngine(tmp_path, EngineConfig(flush_threshold_bytes=2048))
        for schedule in range(1000):
            rng = random.Random(schedule)
            name = f"t{schedule}"
            table = engine.create_table(
                TableSchema(name, schema.columns, schema.primary_key)
            )
            acknowledged = {}
            for step in range(rng.randint(2, 15)):
                op = rng.random()
                if op < 0.7:
                    record = {"k": f"{rng.randint(0, 30):03d}", "v": f"v{step}"}
                    table.insert(record)
                    acknowledged[record["k"]] = record["v"]
                elif op < 0.85:
                    table.flush()
                else:
                    table.simulate_crash()
            table.simulate_crash()
            assert {r["k"]: r["v"] for r in table.scan()} == acknowledged
            engine.drop_table(name)
        engine.close()


def test_criterion_6_block_accounting(capsys, tmp_path):
    with criterion(capsys, 6, "page, slot and segment sizes respect their limits"):
        schema = eventlog_schema()
        for n in (1, 500, 5000, 20_000):
            records = workload_records(n, seed=0)
            plain = RowEngine(tmp_path / f"plain{n}")
            ptable = plain.create_table(schema)
            ptable.bulk_load(records)
            usage = ptable.disk_usage()
            assert usage > 0 and usage % PAGE_SIZE == 0
            plain.close()
            comp = RowEngine(tmp_path / f"comp{n}", EngineConfig(compression="zlib"))
            table = comp.create_table(schema)
            table.bulk_load(records)
            slots = table.compressed_slot_sizes()
            assert slots and all(s in ALLOWED_COMPRESSED_PAGE_SIZES for s in slots)
            comp.close()
            col = ColumnEngine(tmp_path / f"col{n}")
            ctable = col.create_table(schema)
            ctable.bulk_load(records)
            for info in ctable._segments:
                assert len(info.path.read_bytes()) <= SEGMENT_CAP
            col.close()


def test_criterion_7_compression(capsys, tmp_path):
    with criterion(capsys, 7, "codecs round-trip and shrink the step tables"):
        rng = random.Random(7)
        for _ in range(1000):
            payload = rng.randbytes(rng.randint(0, 512))
            for codec in (Codec.ZLIB, Codec.GZIP):
                assert decompress_block(codec, compress_block(codec, payload)) == payload
        empty_delta = len(compress_block(Codec.GZIP, b"")) - len(
            compress_block(Codec.ZLIB, b"")
        )
        assert empty_delta == 12

        log = _chain_log(300)
        codecs = {"row": "zlib", "column": "gzip"}
        for kind in ("row", "column"):
            totals = {}
            for comp in (None, codecs[kind]):
                cfg = EngineConfig(compression=comp or "none")
                engine = make_engine(kind, tmp_path / f"{kind}-{comp or 'plain'}", cfg)
                mine_with_timings(log, engine)
                if kind == "column":
                    for name in STEP_TABLES.values():
                        engine.table(name).flush()
                totals[comp or "plain"] = sum(
                    engine.table(name).disk_usage() for name in STEP_TABLES.values()
                )
                engine.close()
            assert totals[codecs[kind]] < totals["plain"]


def test_criterion_8_benchmark_trends(capsys, tmp_path):
    with criterion(capsys, 8, "benchmark trends hold and the sweep stays under 10 min"):
        t0 = time.perf_counter()
        reports = {}
        for suite in SUITES:
            cfg = BenchmarkConfig(
                suite=suite, repetitions=5, scale=100, workdir=tmp_path / suite
            )
            reports[suite] = run_suite(cfg)

        load = reports["load"]
        largest = str(max(BenchmarkConfig(suite="load", scale=100).load_sizes()))
        assert load.value("load", "column", largest, "load_time") <= load.value(
            "load", "row", largest, "load_time"
        )

        batch = reports["batch"]
        single = reports["single"]
        total = BenchmarkConfig(suite="batch", scale=100).batch_total()
        for kind in ("row", "column"):
            for size in BenchmarkConfig(suite="batch", scale=100).insert_batch_sizes():
                if size < 1000:
                    continue
                per_batch = batch.value("batch", kind, str(size), "batch_time") / total
                per_single = (
                    single.value("single", kind, str(size), "single_insert_time") / size
                )
                assert per_batch * 2 < per_single
        assert time.perf_counter() - t0 < 600


def test_criterion_9_report_format(capsys, tmp_path):
    with criterion(capsys, 9, "CSV output is byte-deterministic, footprints trichotomous"):
        report = BenchmarkReport()
        report.add("load", "row", "1000", "load_time", [0.5, 0.7], "s")
        report.add("disk", "column", "step1", "disk_bytes", [128.0], "B")
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for p in paths:
            write_report_csv(report, p)
        assert paths[0].read_bytes() == paths[1].read_bytes()

        for seed in range(50):
            fp = footprint(random_log(random.Random(seed)))
            for a in fp.activities:
                for b in fp.activities:
                    rel = fp.cell(a, b)
                    assert rel in (
                        Relation.CAUSALITY,
                        Relation.CAUSALITY_REV,
                        Relation.PARALLEL,
                        Relation.CHOICE,
                    )
                    mirror = fp.cell(b, a)
                    if rel is Relation.CAUSALITY:
                        assert mirror is Relation.CAUSALITY_REV
                    elif rel in (Relation.PARALLEL, Relation.CHOICE):
                        assert mirror is rel
