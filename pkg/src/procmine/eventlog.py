"""Event-log parsing, generation and trace building.

An event is the tuple (case id, timestamp, status, activity, actor); the
(case_id, timestamp, status) triple is the composite key that makes every
record unique within a log. Traces are the per-case activity sequences
ordered by (timestamp, status).
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path

from .errors import DuplicateKeyError, EmptyLogError, RowParseError, SchemaError

DEFAULT_TS_FORMAT = "%Y-%m-%d %H:%M:%S"

NATIVE_HEADER = ("CaseID", "Timestamp", "Status", "Activity", "Actor")

#: column mapping for the BPI 2014 incident-activity CSV layout
BPI_MAPPING_COLUMNS = {
    "case_id": "Incident ID",
    "timestamp": "DateTimeStamp",
    "activity": "IncidentActivity_Type",
    "actor": "Assignment Group",
}


@dataclass(frozen=True)
class SchemaMapping:
    """Maps logical event fields onto CSV column names.

    ``status`` and ``actor`` may be None: a missing actor becomes the empty
    string, a missing status is synthesized as a zero-padded per-case
    sequence number in file order (deterministic key disambiguation).
    """

    case_id: str = "CaseID"
    timestamp: str = "Timestamp"
    activity: str = "Activity"
    actor: str | None = "Actor"
    status: str | None = "Status"
    timestamp_format: str = DEFAULT_TS_FORMAT


def bpi_mapping(timestamp_format: str = DEFAULT_TS_FORMAT) -> SchemaMapping:
    return SchemaMapping(
        case_id=BPI_MAPPING_COLUMNS["case_id"],
        timestamp=BPI_MAPPING_COLUMNS["timestamp"],
        activity=BPI_MAPPING_COLUMNS["activity"],
        actor=BPI_MAPPING_COLUMNS["actor"],
        status=None,
        timestamp_format=timestamp_format,
    )


@dataclass(frozen=True)
class Event:
    case_id: str
    timestamp: datetime
    status: str
    activity: str
    actor: str = ""

    @property
    def key(self) -> tuple[str, datetime, str]:
        return (self.case_id, self.timestamp, self.status)


@dataclass(frozen=True)
class Trace:
    case_id: str
    activities: tuple[str, ...]


def _validate_event(ev: Event) -> None:
    if not ev.activity:
        raise SchemaError("activity must be non-empty")
    if "," in ev.activity:
        raise SchemaError(f"activity name {ev.activity!r} contains a comma")


@dataclass(frozen=True)
class EventLog:
    """Immutable collection of events; safe to share across readers."""

    events: tuple[Event, ...]
    _traces: dict[str, Trace] | None = field(
        default=None, repr=False, compare=False, hash=False
    )

    def __init__(self, events):
        events = tuple(events)
        seen = set()
        for ev in events:
            _validate_event(ev)
            if ev.key in seen:
                raise DuplicateKeyError(ev.key)
            seen.add(ev.key)
        object.__setattr__(self, "events", events)
        object.__setattr__(self, "_traces", None)

    def __len__(self) -> int:
        return len(self.events)

    @property
    def traces(self) -> dict[str, Trace]:
        if self._traces is None:
            object.__setattr__(self, "_traces", _build_traces(self.events))
        return self._traces

    @property
    def activities(self) -> frozenset[str]:
        return frozenset(ev.activity for ev in self.events)


def _build_traces(events) -> dict[str, Trace]:
    by_case: dict[str, list[Event]] = {}
    for ev in events:
        by_case.setdefault(ev.case_id, []).append(ev)
    traces = {}
    for case_id in sorted(by_case):
        evs = sorted(by_case[case_id], key=lambda e: (e.timestamp, e.status))
        traces[case_id] = Trace(case_id, tuple(e.activity for e in evs))
    return traces


def build_traces(log: EventLog) -> dict[str, Trace]:
    """Per-case activity sequences ordered by (timestamp, status)."""
    if not log.events:
        raise EmptyLogError("cannot build traces from an empty log")
    return log.traces


def parse_csv(path, mapping: SchemaMapping | None = None) -> EventLog:
    """Parse a CSV file into an EventLog.

    Raises SchemaError when a mapped column is missing from the header,
    RowParseError for an unparseable timestamp or empty activity, and
    DuplicateKeyError when a composite key repeats.
    """
    mapping = mapping or SchemaMapping()
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, header row required") from None
        col_index = {name: i for i, name in enumerate(header)}
        required = [mapping.case_id, mapping.timestamp, mapping.activity]
        if mapping.status is not None:
            required.append(mapping.status)
        if mapping.actor is not None:
            required.append(mapping.actor)
        for col in required:
            if col not in col_index:
                raise SchemaError(f"{path}: missing column {col!r}")

        events: list[Event] = []
        seen: dict[tuple, int] = {}
        case_seq: dict[str, int] = {}
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                case_id = row[col_index[mapping.case_id]]
                raw_ts = row[col_index[mapping.timestamp]]
                activity = row[col_index[mapping.activity]]
                actor = row[col_index[mapping.actor]] if mapping.actor else ""
            except IndexError:
                raise RowParseError(line_no, "short row") from None
            try:
                ts = datetime.strptime(raw_ts, mapping.timestamp_format)
            except ValueError:
                raise RowParseError(line_no, f"unparseable timestamp {raw_ts!r}") from None
            if mapping.status is not None:
                status = row[col_index[mapping.status]]
            else:
                n = case_seq.get(case_id, 0) + 1
                case_seq[case_id] = n
                status = f"{n:06d}"
            if not activity:
                raise RowParseError(line_no, "empty activity")
            if "," in activity:
                raise RowParseError(line_no, f"activity {activity!r} contains a comma")
            key = (case_id, ts, status)
            if key in seen:
                raise DuplicateKeyError(
                    key, f"line {line_no}: duplicate key {key!r} (first at line {seen[key]})"
                )
            seen[key] = line_no
            events.append(Event(case_id, ts, status, activity, actor))
    return EventLog(events)


def write_csv(log: EventLog, path, timestamp_format: str = DEFAULT_TS_FORMAT) -> None:
    """Write a log in the native CSV layout (round-trips through parse_csv)."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(NATIVE_HEADER)
        for ev in log.events:
            writer.writerow(
                [
                    ev.case_id,
                    ev.timestamp.strftime(timestamp_format),
                    ev.status,
                    ev.activity,
                    ev.actor,
                ]
            )


#: trace variants of each generator model
MODEL_VARIANTS: dict[str, tuple[tuple[str, ...], ...]] = {
    "sequence": (("a", "b", "c"),),
    "xor-split": (("a", "b", "d"), ("a", "c", "d")),
    "and-split": (("a", "b", "c", "d"), ("a", "c", "b", "d")),
}

_GEN_EPOCH = datetime(2014, 1, 1, 0, 0, 0)


def generate_synthetic_log(model: str, n_cases: int, seed: int) -> EventLog:
    """Deterministic synthetic log for one of the known process models.

    For n_cases >= 2 every branch variant of the model is guaranteed to
    appear, so the log is directly-follows-complete for that model.
    """
    if model not in MODEL_VARIANTS:
        raise ValueError(f"unknown model {model!r}, expected one of {sorted(MODEL_VARIANTS)}")
    if n_cases < 1:
        raise EmptyLogError("n_cases must be >= 1")
    variants = MODEL_VARIANTS[model]
    rng = random.Random(seed)
    events: list[Event] = []
    for i in range(n_cases):
        # first len(variants) cases cycle through the variants to guarantee coverage
        if i < len(variants):
            variant = variants[i]
        else:
            variant = rng.choice(variants)
        case_id = f"c{i + 1:06d}"
        base = _GEN_EPOCH + timedelta(minutes=i)
        actor = f"u{rng.randrange(1, 5)}"
        for j, activity in enumerate(variant):
            events.append(
                Event(
                    case_id=case_id,
                    timestamp=base + timedelta(seconds=j),
                    status=f"{j + 1:06d}",
                    activity=activity,
                    actor=actor,
                )
            )
    return EventLog(events)
