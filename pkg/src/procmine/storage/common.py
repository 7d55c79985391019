"""Shared storage abstractions: schemas, records, predicates, config, timing.

On-disk conventions used by both engines: little-endian 32-bit length
prefixes, UTF-8 string values, one directory per table.
"""

from __future__ import annotations

import json
import shutil
import struct
import time
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Callable, Iterable, Iterator

from ..errors import (
    SchemaError,
    StorageError,
    TableExistsError,
    UnknownColumnError,
    UnknownTableError,
)
from .compress import Codec

PAGE_SIZE = 16 * 1024
SEGMENT_CAP = 64 * 1024
ALLOWED_COMPRESSED_PAGE_SIZES = (1024, 2048, 4096, 8192, 16384)

_U32 = struct.Struct("<I")

Record = dict[str, str]


def pack_u32(n: int) -> bytes:
    return _U32.pack(n)


def read_u32(buf: bytes, off: int) -> tuple[int, int]:
    return _U32.unpack_from(buf, off)[0], off + 4


def encode_str(s: str) -> bytes:
    raw = s.encode("utf-8")
    return _U32.pack(len(raw)) + raw


def read_str(buf: bytes, off: int) -> tuple[str, int]:
    n, off = read_u32(buf, off)
    return buf[off : off + n].decode("utf-8"), off + n


@dataclass(frozen=True)
class TableSchema:
    name: str
    columns: tuple[tuple[str, str], ...]  # (name, "string" | "timestamp")
    primary_key: tuple[str, ...]

    def __post_init__(self):
        names = [c[0] for c in self.columns]
        if len(set(names)) != len(names):
            raise SchemaError(f"duplicate column names in {self.name}")
        for col in self.primary_key:
            if col not in names:
                raise SchemaError(f"primary key column {col!r} not in columns")
        if not self.primary_key:
            raise SchemaError("primary key must name at least one column")

    @property
    def column_names(self) -> tuple[str, ...]:
        return tuple(c[0] for c in self.columns)

    @property
    def value_columns(self) -> tuple[str, ...]:
        """Columns that are not part of the primary key."""
        return tuple(n for n in self.column_names if n not in self.primary_key)

    def key_of(self, record: Record) -> tuple[str, ...]:
        return tuple(record[c] for c in self.primary_key)

    def validate_record(self, record: Record) -> None:
        for name in self.column_names:
            if name not in record:
                raise SchemaError(f"record missing column {name!r}")
        for col in self.primary_key:
            if record[col] is None or record[col] == "":
                raise SchemaError(f"key column {col!r} must be non-empty")

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "columns": [list(c) for c in self.columns],
            "primary_key": list(self.primary_key),
        }

    @classmethod
    def from_json(cls, data: dict) -> "TableSchema":
        return cls(
            name=data["name"],
            columns=tuple(tuple(c) for c in data["columns"]),
            primary_key=tuple(data["primary_key"]),
        )


#: schema used for event-log tables in both engines
def eventlog_schema(name: str = "eventlog") -> TableSchema:
    return TableSchema(
        name=name,
        columns=(
            ("CaseID", "string"),
            ("Timestamp", "timestamp"),
            ("Status", "string"),
            ("Activity", "string"),
            ("Actor", "string"),
        ),
        primary_key=("CaseID", "Timestamp", "Status"),
    )


@dataclass(frozen=True)
class KeyRange:
    """Inclusive key range; bounds may be prefixes of the full key tuple."""

    low: tuple[str, ...] | None = None
    high: tuple[str, ...] | None = None

    def admits(self, key: tuple[str, ...]) -> bool:
        if self.low is not None and key[: len(self.low)] < self.low:
            return False
        if self.high is not None and key[: len(self.high)] > self.high:
            return False
        return True

    @classmethod
    def equals(cls, prefix: tuple[str, ...]) -> "KeyRange":
        return cls(low=prefix, high=prefix)


@dataclass
class EngineConfig:
    flush_threshold_bytes: int = 1 << 20
    row_buffer_bytes: int = 8 << 20
    column_buffer_bytes: int = 20 << 20
    durability: str = "async"  # "fsync" | "async"
    compression: str = "none"  # "none" | "zlib" | "gzip"
    compressed_page_target: int = 8192
    clock: Callable[[], float] = field(default=time.perf_counter, repr=False)

    def __post_init__(self):
        if self.durability not in ("fsync", "async"):
            raise ValueError(f"bad durability {self.durability!r}")
        if self.compression not in ("none", "zlib", "gzip"):
            raise ValueError(f"bad compression {self.compression!r}")
        if self.compressed_page_target not in ALLOWED_COMPRESSED_PAGE_SIZES:
            raise ValueError("compressed_page_target must be a legal page size")

    @classmethod
    def from_file(cls, path) -> "EngineConfig":
        """Parse a key=value config file (unknown keys rejected)."""
        kwargs = {}
        int_keys = {
            "flush_threshold_bytes",
            "row_buffer_bytes",
            "column_buffer_bytes",
            "compressed_page_target",
        }
        valid = {f.name for f in fields(cls)} - {"clock"}
        for raw in Path(path).read_text(encoding="utf-8").splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"bad config line {raw!r}")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in valid:
                raise ValueError(f"unknown config key {key!r}")
            kwargs[key] = int(value) if key in int_keys else value
        return cls(**kwargs)


@dataclass
class Metrics:
    """Wall-clock accumulators around engine calls; clocks are injectable."""

    read_seconds: float = 0.0
    write_seconds: float = 0.0

    def reset(self) -> None:
        self.read_seconds = 0.0
        self.write_seconds = 0.0

    def snapshot(self) -> tuple[float, float]:
        return (self.read_seconds, self.write_seconds)


@dataclass(frozen=True)
class LoadReport:
    records_loaded: int
    elapsed: float


class Table:
    """Common behavior for both engine table kinds."""

    def __init__(self, engine, schema: TableSchema, codec: Codec, path: Path):
        self.engine = engine
        self.schema = schema
        self.codec = codec
        self.path = path

    # -- helpers -----------------------------------------------------------

    def _clock(self) -> float:
        return self.engine.config.clock()

    def _check_projection(self, projection) -> tuple[str, ...]:
        if projection is None:
            return self.schema.column_names
        for col in projection:
            if col not in self.schema.column_names:
                raise UnknownColumnError(f"unknown column {col!r}")
        return tuple(projection)

    def encode_record(self, record: Record) -> bytes:
        return b"".join(encode_str(record[c]) for c in self.schema.column_names)

    def decode_record(self, buf: bytes, off: int = 0) -> Record:
        record = {}
        for c in self.schema.column_names:
            record[c], off = read_str(buf, off)
        return record

    # -- interface ---------------------------------------------------------

    def insert(self, record: Record) -> None:
        raise NotImplementedError

    def insert_batch(self, records: Iterable[Record], batch_size: int) -> None:
        raise NotImplementedError

    def bulk_load(self, records: Iterable[Record]) -> LoadReport:
        raise NotImplementedError

    def scan(self, projection=None, predicate: KeyRange | None = None) -> Iterator[Record]:
        raise NotImplementedError

    def disk_usage(self) -> int:
        raise NotImplementedError

    def close(self) -> None:
        pass


class StorageEngine:
    """Directory-backed engine; one subdirectory per table."""

    kind: str = "abstract"
    _table_cls: type[Table] | None = None

    def __init__(self, root, config: EngineConfig | None = None):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.config = config or EngineConfig()
        self.metrics = Metrics()
        self.tables: dict[str, Table] = {}
        self._discover()

    def _discover(self) -> None:
        for meta_path in sorted(self.root.glob("*/meta.json")):
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
            if meta.get("engine") != self.kind:
                raise StorageError(
                    f"table {meta_path.parent.name} belongs to a {meta['engine']} engine"
                )
            schema = TableSchema.from_json(meta["schema"])
            codec = Codec(meta["compression"])
            table = self._table_cls(self, schema, codec, meta_path.parent, create=False)
            self.tables[schema.name] = table

    def create_table(self, schema: TableSchema, compression: str | Codec | None = None) -> Table:
        if schema.name in self.tables:
            raise TableExistsError(f"table {schema.name!r} already exists")
        codec = Codec(compression.value if isinstance(compression, Codec) else (compression or self.config.compression))
        tdir = self.root / schema.name
        if tdir.exists():
            raise TableExistsError(f"table directory {tdir} already exists")
        tdir.mkdir(parents=True)
        meta = {"engine": self.kind, "schema": schema.to_json(), "compression": codec.value}
        (tdir / "meta.json").write_text(json.dumps(meta), encoding="utf-8")
        table = self._table_cls(self, schema, codec, tdir, create=True)
        self.tables[schema.name] = table
        return table

    def table(self, name: str) -> Table:
        try:
            return self.tables[name]
        except KeyError:
            raise UnknownTableError(f"no such table {name!r}") from None

    def drop_table(self, name: str) -> None:
        table = self.table(name)
        table.close()
        del self.tables[name]
        shutil.rmtree(table.path)

    def close(self) -> None:
        for table in self.tables.values():
            table.close()
