"""Column-oriented engine: write-ahead log, sorted memstore, immutable segments.

Acknowledged writes reach the WAL before the memstore; a read consults the
memstore first, then segments newest-to-oldest (last writer wins per key,
no uniqueness errors). Segments store a shared sorted key vector plus
per-column value runs and never exceed 64 KiB before compression. Bulk
load partitions records into two sorted runs and writes segments
directly, bypassing the memstore.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from ..errors import StorageError, UnsupportedOperationError
from .common import (
    SEGMENT_CAP,
    KeyRange,
    LoadReport,
    Record,
    StorageEngine,
    Table,
    TableSchema,
    encode_str,
    pack_u32,
    read_str,
    read_u32,
)
from .compress import Codec, compress_block, decompress_block

_SEG_RE = re.compile(r"seg-(\d+)\.dat$")


@dataclass
class SegmentInfo:
    seg_id: int
    path: Path
    min_key: tuple[str, ...]
    max_key: tuple[str, ...]
    size_bytes: int

    def overlaps(self, predicate: KeyRange | None) -> bool:
        if predicate is None:
            return True
        if predicate.low is not None and self.max_key[: len(predicate.low)] < predicate.low:
            return False
        if predicate.high is not None and self.min_key[: len(predicate.high)] > predicate.high:
            return False
        return True


class ColumnTable(Table):
    def __init__(self, engine, schema: TableSchema, codec: Codec, path: Path, create: bool):
        super().__init__(engine, schema, codec, path)
        self._wal_path = path / "wal.log"
        self._memstore: dict[tuple[str, ...], Record] = {}
        self._mem_bytes = 0
        self._segments: list[SegmentInfo] = []
        self._next_seg = 0
        if create:
            self._wal_path.write_bytes(b"")
        else:
            self._recover_from_disk()
        self._wal_fh = self._wal_path.open("ab")

    # -- recovery ----------------------------------------------------------

    def _recover_from_disk(self) -> None:
        self._segments = []
        for seg_path in sorted(self.path.glob("seg-*.dat"), key=_seg_number):
            self._segments.append(self._segment_info(seg_path))
        self._next_seg = max((s.seg_id for s in self._segments), default=-1) + 1
        self._memstore = {}
        self._mem_bytes = 0
        if self._wal_path.exists():
            self._replay_wal(self._wal_path.read_bytes())

    def _replay_wal(self, buf: bytes) -> None:
        nkey = len(self.schema.primary_key)
        off = 0
        while off + 4 <= len(buf):
            frame_len, off = read_u32(buf, off)
            if off + frame_len > len(buf):
                break  # trailing partial frame from an interrupted write
            end = off + frame_len
            key = []
            for _ in range(nkey):
                k, off = read_str(buf, off)
                key.append(k)
            col, off = read_str(buf, off)
            val, off = read_str(buf, off)
            assert off == end
            record = self._memstore.setdefault(tuple(key), {})
            record[col] = val
        self._mem_bytes = sum(
            self._record_bytes(r) for r in self._memstore.values()
        )

    def simulate_crash(self) -> None:
        """Drop all volatile state and recover from the on-disk files."""
        self._wal_fh.close()
        self._recover_from_disk()
        self._wal_fh = self._wal_path.open("ab")

    # -- write path --------------------------------------------------------

    def _record_bytes(self, record: Record) -> int:
        return sum(len(v.encode("utf-8")) + 4 for v in record.values())

    def _wal_frames(self, record: Record) -> bytes:
        key_enc = b"".join(encode_str(record[c]) for c in self.schema.primary_key)
        frames = []
        for col in self.schema.column_names:
            payload = key_enc + encode_str(col) + encode_str(record[col])
            frames.append(pack_u32(len(payload)) + payload)
        return b"".join(frames)

    def _wal_append(self, blob: bytes) -> None:
        self._wal_fh.write(blob)
        self._wal_fh.flush()
        if self.engine.config.durability == "fsync":
            os.fsync(self._wal_fh.fileno())

    def _memstore_put(self, record: Record) -> None:
        key = self.schema.key_of(record)
        old = self._memstore.get(key)
        if old is not None:
            self._mem_bytes -= self._record_bytes(old)
        self._memstore[key] = dict(record)
        self._mem_bytes += self._record_bytes(record)

    def insert(self, record: Record) -> None:
        self.schema.validate_record(record)
        t0 = self._clock()
        self._wal_append(self._wal_frames(record))
        self._memstore_put(record)
        self.engine.metrics.write_seconds += self._clock() - t0
        self._maybe_flush()

    def insert_batch(self, records: Iterable[Record], batch_size: int) -> None:
        if batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        t0 = self._clock()
        buffer_cap = self.engine.config.column_buffer_bytes
        chunk: list[Record] = []
        chunk_bytes = 0
        for record in records:
            self.schema.validate_record(record)
            chunk.append(record)
            chunk_bytes += self._record_bytes(record)
            if len(chunk) >= batch_size or chunk_bytes >= buffer_cap:
                self._apply_chunk(chunk)
                chunk, chunk_bytes = [], 0
        if chunk:
            self._apply_chunk(chunk)
        self.engine.metrics.write_seconds += self._clock() - t0
        self._maybe_flush()

    def _apply_chunk(self, chunk: list[Record]) -> None:
        self._wal_append(b"".join(self._wal_frames(r) for r in chunk))
        for record in chunk:
            self._memstore_put(record)

    def _maybe_flush(self) -> None:
        if self._mem_bytes >= self.engine.config.flush_threshold_bytes:
            self.flush()

    def bulk_load(self, records: Iterable[Record]) -> LoadReport:
        """Partition into two sorted runs and write segments directly."""
        t0 = self._clock()
        last_wins: dict[tuple[str, ...], Record] = {}
        count = 0
        for record in records:
            self.schema.validate_record(record)
            last_wins[self.schema.key_of(record)] = dict(record)
            count += 1
        items = sorted(last_wins.items())
        mid = len(items) // 2
        for part in (items[:mid], items[mid:]):
            if part:
                self._write_segments(part)
        elapsed = self._clock() - t0
        self.engine.metrics.write_seconds += elapsed
        return LoadReport(records_loaded=count, elapsed=elapsed)

    # -- segments ----------------------------------------------------------

    def _encoded_sizes(self) -> tuple[int, dict[str, int]]:
        base = 8  # nkeys + ncols
        name_overhead = {}
        for col in self.schema.value_columns:
            base += 4 + len(col.encode("utf-8")) + 4
            name_overhead[col] = 0
        return base, name_overhead

    def _record_segment_bytes(self, key: tuple[str, ...], record: Record) -> int:
        n = sum(4 + len(k.encode("utf-8")) for k in key)
        n += sum(4 + len(record[c].encode("utf-8")) for c in self.schema.value_columns)
        return n

    def _write_segments(self, items: list[tuple[tuple[str, ...], Record]]) -> list[int]:
        base, _ = self._encoded_sizes()
        seg_ids = []
        group: list[tuple[tuple[str, ...], Record]] = []
        size = base
        for key, record in items:
            rec_bytes = self._record_segment_bytes(key, record)
            if base + rec_bytes > SEGMENT_CAP:
                raise StorageError("record larger than the segment cap")
            if group and size + rec_bytes > SEGMENT_CAP:
                seg_ids.append(self._emit_segment(group))
                group, size = [], base
            group.append((key, record))
            size += rec_bytes
        if group:
            seg_ids.append(self._emit_segment(group))
        return seg_ids

    def _emit_segment(self, items: list[tuple[tuple[str, ...], Record]]) -> int:
        raw = self._encode_segment(items)
        data = compress_block(self.codec, raw)
        seg_id = self._next_seg
        self._next_seg += 1
        seg_path = self.path / f"seg-{seg_id}.dat"
        seg_path.write_bytes(data)
        if self.engine.config.durability == "fsync":
            with seg_path.open("rb") as fh:
                os.fsync(fh.fileno())
        self._segments.append(
            SegmentInfo(seg_id, seg_path, items[0][0], items[-1][0], len(data))
        )
        return seg_id

    def _encode_segment(self, items: list[tuple[tuple[str, ...], Record]]) -> bytes:
        parts = [pack_u32(len(items))]
        for key, _ in items:
            for k in key:
                parts.append(encode_str(k))
        value_cols = self.schema.value_columns
        parts.append(pack_u32(len(value_cols)))
        for col in value_cols:
            run = b"".join(encode_str(record[col]) for _, record in items)
            parts.append(encode_str(col))
            parts.append(pack_u32(len(run)))
            parts.append(run)
        return b"".join(parts)

    def _segment_info(self, seg_path: Path) -> SegmentInfo:
        data = seg_path.read_bytes()
        raw = decompress_block(self.codec, data)
        keys = self._decode_keys(raw)[0]
        return SegmentInfo(
            _seg_number(seg_path), seg_path, keys[0], keys[-1], len(data)
        )

    def _decode_keys(self, raw: bytes) -> tuple[list[tuple[str, ...]], int]:
        nkeys, off = read_u32(raw, 0)
        nkey_cols = len(self.schema.primary_key)
        keys = []
        for _ in range(nkeys):
            key = []
            for _ in range(nkey_cols):
                k, off = read_str(raw, off)
                key.append(k)
            keys.append(tuple(key))
        return keys, off

    def _read_segment(
        self, info: SegmentInfo, columns: tuple[str, ...]
    ) -> dict[tuple[str, ...], Record]:
        """Decode only the requested value columns (key columns are free)."""
        raw = decompress_block(self.codec, info.path.read_bytes())
        keys, off = self._decode_keys(raw)
        ncols, off = read_u32(raw, off)
        wanted = set(columns)
        out: dict[tuple[str, ...], Record] = {
            key: dict(zip(self.schema.primary_key, key)) for key in keys
        }
        for _ in range(ncols):
            col, off = read_str(raw, off)
            run_len, off = read_u32(raw, off)
            if col in wanted:
                run_off = off
                for key in keys:
                    val, run_off = read_str(raw, run_off)
                    out[key][col] = val
            off += run_len
        return out

    # -- flush / compact ---------------------------------------------------

    def flush(self) -> list[int]:
        """Convert the memstore to segments and truncate the WAL."""
        t0 = self._clock()
        if not self._memstore:
            self.engine.metrics.write_seconds += self._clock() - t0
            return []
        items = sorted(self._memstore.items())
        seg_ids = self._write_segments(items)
        self._memstore = {}
        self._mem_bytes = 0
        self._wal_fh.close()
        self._wal_path.write_bytes(b"")
        self._wal_fh = self._wal_path.open("ab")
        self.engine.metrics.write_seconds += self._clock() - t0
        return seg_ids

    def compact(self) -> list[int]:
        """Merge all segments into the minimal sorted set, newest version wins."""
        t0 = self._clock()
        merged: dict[tuple[str, ...], Record] = {}
        for info in self._segments:  # oldest first; later segments supersede
            merged.update(self._read_segment(info, self.schema.value_columns))
        old = self._segments
        self._segments = []
        for info in old:
            info.path.unlink()
        seg_ids = self._write_segments(sorted(merged.items())) if merged else []
        self.engine.metrics.write_seconds += self._clock() - t0
        return seg_ids

    # -- read path ---------------------------------------------------------

    def scan(self, projection=None, predicate: KeyRange | None = None) -> Iterator[Record]:
        projection = self._check_projection(projection)
        t0 = self._clock()
        value_cols = tuple(c for c in projection if c in self.schema.value_columns)
        merged: dict[tuple[str, ...], Record] = {}
        for info in self._segments:  # oldest to newest so newer versions win
            if not info.overlaps(predicate):
                continue
            for key, record in self._read_segment(info, value_cols).items():
                if predicate is None or predicate.admits(key):
                    merged[key] = record
        for key, record in self._memstore.items():  # memstore is newest
            if predicate is None or predicate.admits(key):
                merged[key] = record
        out = [
            {c: merged[key][c] for c in projection} for key in sorted(merged)
        ]
        self.engine.metrics.read_seconds += self._clock() - t0
        return iter(out)

    def disk_usage(self) -> int:
        """Actual segment byte lengths; WAL and metadata excluded."""
        return sum(info.path.stat().st_size for info in self._segments)

    @property
    def segment_count(self) -> int:
        return len(self._segments)

    @property
    def memstore_bytes(self) -> int:
        return self._mem_bytes

    def close(self) -> None:
        if not self._wal_fh.closed:
            self._wal_fh.close()


def _seg_number(path: Path) -> int:
    return int(_SEG_RE.search(path.name).group(1))


class ColumnEngine(StorageEngine):
    kind = "column"
    _table_cls = ColumnTable
