"""Process discovery over embedded row- and column-oriented storage engines."""

from .eventlog import (
    Event,
    EventLog,
    SchemaMapping,
    Trace,
    build_traces,
    generate_synthetic_log,
    parse_csv,
    write_csv,
)
from .miner import AlphaMiner, check_event_log, mine, mine_with_timings
from .petri import ActivitySetPair, FlowArc, PetriNet, Place, export_dot, export_pnml, parse_pnml
from .relations import (
    FootprintMatrix,
    Relation,
    causality_pairs,
    directly_follows,
    footprint,
    not_connected,
)
from .storage import ColumnEngine, EngineConfig, KeyRange, RowEngine, make_engine

__version__ = "0.1.0"

__all__ = [
    "ActivitySetPair",
    "AlphaMiner",
    "ColumnEngine",
    "EngineConfig",
    "Event",
    "EventLog",
    "FlowArc",
    "FootprintMatrix",
    "KeyRange",
    "PetriNet",
    "Place",
    "Relation",
    "RowEngine",
    "SchemaMapping",
    "Trace",
    "build_traces",
    "causality_pairs",
    "check_event_log",
    "directly_follows",
    "export_dot",
    "export_pnml",
    "footprint",
    "generate_synthetic_log",
    "make_engine",
    "mine",
    "mine_with_timings",
    "not_connected",
    "parse_csv",
    "parse_pnml",
    "write_csv",
]
