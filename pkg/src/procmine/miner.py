"""The seven mining steps, executed over a storage engine.

Every step persists its result table into the engine (totalEvent,
initialEvent, finalEvent, XL, YL, PL, FL) so that per-step reads and
writes can be timed; the discovered net is identical for both engine
kinds because each step only depends on key-ordered scans.
"""

from __future__ import annotations

import tempfile
from dataclasses import dataclass
from pathlib import Path

from .errors import EmptyLogError
from .eventlog import DEFAULT_TS_FORMAT, EventLog
from .petri import SINK, SOURCE, ActivitySetPair, FlowArc, PetriNet, Place
from .relations import (
    FootprintMatrix,
    Relation,
    causality_pairs,
    footprint_from_follows,
)
from .storage import (
    EngineConfig,
    Record,
    StorageEngine,
    TableSchema,
    eventlog_schema,
    make_engine,
)

#: result table of each mining step
STEP_TABLES = {
    1: "totalEvent",
    2: "initialEvent",
    3: "finalEvent",
    4: "XL",
    5: "YL",
    6: "PL",
    7: "FL",
}


def log_records(log: EventLog, timestamp_format: str = DEFAULT_TS_FORMAT) -> list[Record]:
    return [
        {
            "CaseID": ev.case_id,
            "Timestamp": ev.timestamp.strftime(timestamp_format),
            "Status": ev.status,
            "Activity": ev.activity,
            "Actor": ev.actor,
        }
        for ev in log.events
    ]


def load_log(engine: StorageEngine, log: EventLog, compression: str | None = None):
    """(Re)create the eventlog table and bulk-load the log into it."""
    if not log.events:
        raise EmptyLogError("cannot load an empty log")
    if "eventlog" in engine.tables:
        engine.drop_table("eventlog")
    table = engine.create_table(eventlog_schema(), compression)
    table.bulk_load(log_records(log))
    return table


def _persist(engine: StorageEngine, name: str, columns: tuple[str, ...], rows) -> None:
    if name in engine.tables:
        engine.drop_table(name)
    schema = TableSchema(
        name=name,
        columns=tuple((c, "string") for c in columns),
        primary_key=columns,
    )
    table = engine.create_table(schema)
    table.bulk_load([dict(zip(columns, row)) for row in sorted(set(rows))])


def _join(names) -> str:
    return ",".join(sorted(names))


def step1_total_events(engine: StorageEngine) -> frozenset[str]:
    """Distinct activities of the event log."""
    rows = engine.table("eventlog").scan(projection=["Activity"])
    t_l = frozenset(r["Activity"] for r in rows)
    _persist(engine, "totalEvent", ("event",), ((a,) for a in t_l))
    return t_l


def step2_initial_events(engine: StorageEngine) -> frozenset[str]:
    """First activity of every trace (minimum (timestamp, status) per case)."""
    t_i = set()
    last_case = None
    for r in engine.table("eventlog").scan(projection=["CaseID", "Activity"]):
        if r["CaseID"] != last_case:
            t_i.add(r["Activity"])
            last_case = r["CaseID"]
    _persist(engine, "initialEvent", ("initial",), ((a,) for a in t_i))
    return frozenset(t_i)


def step3_final_events(engine: StorageEngine) -> frozenset[str]:
    """Last activity of every trace (maximum (timestamp, status) per case)."""
    t_o = set()
    last_case = None
    last_activity = None
    for r in engine.table("eventlog").scan(projection=["CaseID", "Activity"]):
        if last_case is not None and r["CaseID"] != last_case:
            t_o.add(last_activity)
        last_case, last_activity = r["CaseID"], r["Activity"]
    if last_activity is not None:
        t_o.add(last_activity)
    _persist(engine, "finalEvent", ("final",), ((a,) for a in t_o))
    return frozenset(t_o)


def engine_traces(engine: StorageEngine) -> list[tuple[str, ...]]:
    """Per-case activity sequences read from the engine's key-ordered scan."""
    traces: list[tuple[str, ...]] = []
    current: list[str] = []
    last_case = None
    for r in engine.table("eventlog").scan(projection=["CaseID", "Activity"]):
        if r["CaseID"] != last_case and current:
            traces.append(tuple(current))
            current = []
        current.append(r["Activity"])
        last_case = r["CaseID"]
    if current:
        traces.append(tuple(current))
    return traces


def engine_footprint(engine: StorageEngine) -> FootprintMatrix:
    follows = set()
    activities = set()
    for trace in engine_traces(engine):
        activities.update(trace)
        for i in range(len(trace) - 1):
            follows.add((trace[i], trace[i + 1]))
    return footprint_from_follows(activities, frozenset(follows))


def step4_xl(fp: FootprintMatrix) -> frozenset[ActivitySetPair]:
    """All (A, B) pairs: choice-closed sets with full A-to-B causality.

    Seeds from the causality pairs, then grows either side with
    choice-compatible activities; every valid pair is reachable this way
    because each of its sub-pairs is itself valid.
    """
    caus = causality_pairs(fp)
    choice = {
        pair for pair, rel in fp.cells.items() if rel is Relation.CHOICE
    }
    acts = fp.activities
    seeds = {
        (frozenset((a,)), frozenset((b,)))
        for a, b in caus
        if (a, a) in choice and (b, b) in choice
    }
    seen = set(seeds)
    stack = list(seeds)
    while stack:
        set_a, set_b = stack.pop()
        for x in acts:
            if (x, x) not in choice:
                continue
            if (
                x not in set_a
                and all((x, a) in choice for a in set_a)
                and all((x, b) in caus for b in set_b)
            ):
                cand = (set_a | {x}, set_b)
                if cand not in seen:
                    seen.add(cand)
                    stack.append(cand)
            if (
                x not in set_b
                and all((x, b) in choice for b in set_b)
                and all((a, x) in caus for a in set_a)
            ):
                cand = (set_a, set_b | {x})
                if cand not in seen:
                    seen.add(cand)
                    stack.append(cand)
    return frozenset(ActivitySetPair(a, b) for a, b in seen)


def step5_yl(xl: frozenset[ActivitySetPair]) -> frozenset[ActivitySetPair]:
    """Maximal pairs only: drop pairs componentwise-contained in another."""
    return frozenset(
        p
        for p in xl
        if not any(other != p and other.contains(p) for other in xl)
    )


def step6_places(yl: frozenset[ActivitySetPair]) -> frozenset[Place]:
    return frozenset({SOURCE, SINK} | {Place("internal", p) for p in yl})


def step7_flow(
    yl: frozenset[ActivitySetPair], t_i: frozenset[str], t_o: frozenset[str]
) -> frozenset[FlowArc]:
    arcs: set[FlowArc] = set()
    for p in yl:
        place = Place("internal", p)
        for a in p.set_a:
            arcs.add(FlowArc(a, place))
        for b in p.set_b:
            arcs.add(FlowArc(place, b))
    for t in t_i:
        arcs.add(FlowArc(SOURCE, t))
    for t in t_o:
        arcs.add(FlowArc(t, SINK))
    return frozenset(arcs)


@dataclass(frozen=True)
class StepTiming:
    step: int
    elapsed: float
    read_seconds: float
    write_seconds: float


def _persist_pairs(engine, name, pairs) -> None:
    _persist(
        engine,
        name,
        ("setA", "setB"),
        ((_join(p.set_a), _join(p.set_b)) for p in pairs),
    )


def _endpoint(x) -> str:
    return x.name if isinstance(x, Place) else x


def mine_with_timings(
    log: EventLog, engine: StorageEngine
) -> tuple[PetriNet, list[StepTiming]]:
    """Run steps 1-7 over the engine, timing each step and its I/O split."""
    if not log.events:
        raise EmptyLogError("cannot mine an empty log")
    load_log(engine, log)
    clock = engine.config.clock
    timings: list[StepTiming] = []

    def timed(step: int, fn):
        engine.metrics.reset()
        t0 = clock()
        result = fn()
        elapsed = clock() - t0
        read_s, write_s = engine.metrics.snapshot()
        timings.append(StepTiming(step, elapsed, read_s, write_s))
        return result

    t_l = timed(1, lambda: step1_total_events(engine))
    t_i = timed(2, lambda: step2_initial_events(engine))
    t_o = timed(3, lambda: step3_final_events(engine))

    def run_step4():
        fp = engine_footprint(engine)
        xl = step4_xl(fp)
        _persist_pairs(engine, "XL", xl)
        return xl

    xl = timed(4, run_step4)

    def run_step5():
        yl = step5_yl(xl)
        _persist_pairs(engine, "YL", yl)
        return yl

    yl = timed(5, run_step5)

    def run_step6():
        places = step6_places(yl)
        _persist(engine, "PL", ("place",), ((p.name,) for p in places))
        return places

    places = timed(6, run_step6)

    def run_step7():
        flow = step7_flow(yl, t_i, t_o)
        _persist(
            engine,
            "FL",
            ("firstplace", "secondplace"),
            ((_endpoint(a.source), _endpoint(a.target)) for a in flow),
        )
        return flow

    flow = timed(7, run_step7)
    return PetriNet(t_l, places, flow), timings


def mine(log: EventLog, engine: StorageEngine) -> PetriNet:
    """Discover a Petri net from the log, executing against the engine."""
    net, _ = mine_with_timings(log, engine)
    return net


def check_event_log(log) -> EventLog:
    """Validate an input log: right type and non-empty."""
    if not isinstance(log, EventLog):
        raise TypeError(f"expected an EventLog, got {type(log).__name__}")
    if not log.events:
        raise EmptyLogError("log has no events")
    return log


class AlphaMiner:
    """Estimator-style front end: configure the backend, fit a log, read net_.

    Follows the fit/get_params convention so the miner drops into
    pipeline-style tooling; the discovered model is exposed as ``net_``
    and the footprint matrix as ``footprint_`` after fit.
    """

    def __init__(self, backend: str = "column", workdir=None, config: EngineConfig | None = None):
        self.backend = backend
        self.workdir = workdir
        self.config = config

    def get_params(self, deep: bool = True) -> dict:
        return {"backend": self.backend, "workdir": self.workdir, "config": self.config}

    def set_params(self, **params) -> "AlphaMiner":
        for key, value in params.items():
            if key not in self.get_params():
                raise ValueError(f"invalid parameter {key!r}")
            setattr(self, key, value)
        return self

    def fit(self, log: EventLog) -> "AlphaMiner":
        check_event_log(log)
        workdir = Path(self.workdir) if self.workdir else Path(tempfile.mkdtemp(prefix="procmine-"))
        engine = make_engine(self.backend, workdir, self.config)
        try:
            net, timings = mine_with_timings(log, engine)
            self.footprint_ = engine_footprint(engine)
        finally:
            engine.close()
        self.net_ = net
        self.step_timings_ = timings
        return self

    def fit_transform(self, log: EventLog) -> PetriNet:
        return self.fit(log).net_
