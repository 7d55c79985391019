"""Embedded storage engines behind one table interface."""

from .colstore import ColumnEngine, ColumnTable
from .common import (
    ALLOWED_COMPRESSED_PAGE_SIZES,
    PAGE_SIZE,
    SEGMENT_CAP,
    EngineConfig,
    KeyRange,
    LoadReport,
    Metrics,
    Record,
    StorageEngine,
    Table,
    TableSchema,
    eventlog_schema,
)
from .compress import Codec, compress_block, decompress_block
from .rowstore import RowEngine, RowTable

ENGINE_KINDS = {"row": RowEngine, "column": ColumnEngine}


def make_engine(kind: str, root, config: EngineConfig | None = None) -> StorageEngine:
    try:
        cls = ENGINE_KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown engine kind {kind!r}") from None
    return cls(root, config)


__all__ = [
    "ALLOWED_COMPRESSED_PAGE_SIZES",
    "PAGE_SIZE",
    "SEGMENT_CAP",
    "Codec",
    "ColumnEngine",
    "ColumnTable",
    "EngineConfig",
    "ENGINE_KINDS",
    "KeyRange",
    "LoadReport",
    "Metrics",
    "Record",
    "RowEngine",
    "RowTable",
    "StorageEngine",
    "Table",
    "TableSchema",
    "compress_block",
    "decompress_block",
    "eventlog_schema",
    "make_engine",
]
