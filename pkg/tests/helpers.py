"""Shared test utilities: log builders and brute-force oracles."""

from __future__ import annotations

import itertools
import random
from datetime import datetime, timedelta

from procmine.eventlog import Event, EventLog
from procmine.petri import ActivitySetPair
from procmine.relations import FootprintMatrix, Relation

_BASE = datetime(2014, 3, 1, 9, 0, 0)


def log_from_traces(traces) -> EventLog:
    """Build a log whose trace set is exactly the given activity sequences."""
    events = []
    for i, trace in enumerate(traces):
        case_id = f"c{i + 1:04d}"
        base = _BASE + timedelta(hours=i)
        for j, activity in enumerate(trace):
            events.append(
                Event(case_id, base + timedelta(seconds=j), f"{j + 1:06d}", activity, "u1")
            )
    return EventLog(events)


L_XOR_TRACES = [("a", "b", "d"), ("a", "c", "d")]
L_PAR_TRACES = [("a", "b", "c", "d"), ("a", "c", "b", "d"), ("a", "e", "d")]


def l_xor_log() -> EventLog:
    return log_from_traces(L_XOR_TRACES)


def l_par_log() -> EventLog:
    return log_from_traces(L_PAR_TRACES)


def random_log(rng: random.Random, max_activities: int = 6, max_traces: int = 20) -> EventLog:
    alphabet = [chr(ord("a") + i) for i in range(rng.randint(1, max_activities))]
    n_traces = rng.randint(1, max_traces)
    traces = []
    for _ in range(n_traces):
        length = rng.randint(1, 6)
        traces.append(tuple(rng.choice(alphabet) for _ in range(length)))
    return log_from_traces(traces)


def brute_force_xl(fp: FootprintMatrix) -> frozenset[ActivitySetPair]:
    """Enumerate every subset pair of the alphabet and keep the valid ones."""
    acts = fp.activities
    subsets = []
    for r in range(1, len(acts) + 1):
        subsets.extend(frozenset(c) for c in itertools.combinations(acts, r))
    choice_closed = [
        s
        for s in subsets
        if all(fp.cell(x, y) is Relation.CHOICE for x in s for y in s)
    ]
    out = set()
    for set_a in choice_closed:
        for set_b in choice_closed:
            if all(fp.cell(a, b) is Relation.CAUSALITY for a in set_a for b in set_b):
                out.add(ActivitySetPair(set_a, set_b))
    return frozenset(out)


def brute_force_yl(xl) -> frozenset[ActivitySetPair]:
    """Maximality filter by pairwise componentwise containment."""
    out = set()
    for p in xl:
        maximal = True
        for q in xl:
            if q != p and p.set_a <= q.set_a and p.set_b <= q.set_b:
                maximal = False
                break
        if maximal:
            out.add(p)
    return frozenset(out)


def directly_follows_oracle(log: EventLog) -> frozenset[tuple[str, str]]:
    """Adjacency enumeration over every trace, independent of the library path."""
    pairs = set()
    for trace in log.traces.values():
        seq = trace.activities
        pairs.update((seq[i], seq[i + 1]) for i in range(len(seq) - 1))
    return frozenset(pairs)
