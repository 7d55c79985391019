"""Ordering relations and the footprint matrix.

The four relations over activity pairs are derived from the
directly-follows set alone: causality (one direction of directly-follows
only), parallel (both directions), choice (neither).
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass

from .errors import EmptyLogError
from .eventlog import EventLog


class Relation(enum.Enum):
    CAUSALITY = "->"
    CAUSALITY_REV = "<-"
    PARALLEL = "||"
    CHOICE = "#"


def directly_follows(log: EventLog) -> frozenset[tuple[str, str]]:
    """All ordered pairs (a, b) where a immediately precedes b in some trace."""
    if not log.events:
        raise EmptyLogError("directly_follows of an empty log")
    pairs = set()
    for trace in log.traces.values():
        acts = trace.activities
        for i in range(len(acts) - 1):
            pairs.add((acts[i], acts[i + 1]))
    return frozenset(pairs)


@dataclass(frozen=True)
class FootprintMatrix:
    """Dense pairwise relation table over the distinct activities.

    ``cells`` is total: every ordered pair of activities (including
    self-pairs) maps to exactly one Relation.
    """

    activities: tuple[str, ...]
    cells: dict[tuple[str, str], Relation]
    follows: frozenset[tuple[str, str]]

    def cell(self, a: str, b: str) -> Relation:
        return self.cells[(a, b)]

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(",".join([""] + list(self.activities)) + "\r\n")
        for a in self.activities:
            row = [a] + [self.cells[(a, b)].value for b in self.activities]
            out.write(",".join(row) + "\r\n")
        return out.getvalue()


def footprint_from_follows(
    activities, follows: frozenset[tuple[str, str]]
) -> FootprintMatrix:
    """Build the matrix from a directly-follows set and the activity alphabet."""
    acts = tuple(sorted(activities))
    cells: dict[tuple[str, str], Relation] = {}
    for a in acts:
        for b in acts:
            fwd = (a, b) in follows
            back = (b, a) in follows
            if fwd and back:
                rel = Relation.PARALLEL
            elif fwd:
                rel = Relation.CAUSALITY
            elif back:
                rel = Relation.CAUSALITY_REV
            else:
                rel = Relation.CHOICE
            cells[(a, b)] = rel
    return FootprintMatrix(activities=acts, cells=cells, follows=frozenset(follows))


def footprint(log: EventLog) -> FootprintMatrix:
    if not log.events:
        raise EmptyLogError("footprint of an empty log")
    return footprint_from_follows(log.activities, directly_follows(log))


def causality_pairs(fp: FootprintMatrix) -> frozenset[tuple[str, str]]:
    """All ordered pairs (a, b) with a causally preceding b."""
    return frozenset(
        (a, b) for (a, b), rel in fp.cells.items() if rel is Relation.CAUSALITY
    )


def not_connected(fp: FootprintMatrix) -> frozenset[frozenset[str]]:
    """All unordered pairs {a, b} (self-pairs included) in the choice relation."""
    return frozenset(
        frozenset((a, b))
        for (a, b), rel in fp.cells.items()
        if rel is Relation.CHOICE and a <= b
    )
