"""Row-oriented engine: whole records in fixed 16 KiB pages, ordered key index.

Every record lives wholly inside one page; pages belong to exactly one
table. The index is an ordered map from the primary-key tuple to a
(page, slot) location, persisted as an append-only entry log, and an
in-order index walk yields key-sorted records. Inserts check key
uniqueness and are written through to disk. In compressed mode each page
is recompressed into a legal slot size (default 8 KiB), splitting pages
whose compressed image does not fit.
"""

from __future__ import annotations

import bisect
import os
from pathlib import Path
from typing import Iterable, Iterator

from ..errors import (
    CompressionError,
    DuplicateKeyError,
    StorageError,
    UnsupportedOperationError,
)
from .common import (
    ALLOWED_COMPRESSED_PAGE_SIZES,
    PAGE_SIZE,
    LoadReport,
    Record,
    StorageEngine,
    Table,
    TableSchema,
    KeyRange,
    pack_u32,
    read_u32,
)
from .compress import Codec, compress_block, decompress_block

_PAGE_HEADER = 8  # slot count u32 + free offset u32


def _new_page() -> bytearray:
    page = bytearray(PAGE_SIZE)
    page[0:4] = pack_u32(0)
    page[4:8] = pack_u32(_PAGE_HEADER)
    return page


class RowTable(Table):
    def __init__(self, engine, schema: TableSchema, codec: Codec, path: Path, create: bool):
        super().__init__(engine, schema, codec, path)
        self._pages: list[bytearray] = []
        self._page_offsets: list[list[int]] = []  # per page, byte offset of each slot
        self._index: dict[tuple[str, ...], tuple[int, int]] = {}
        self._sorted_keys: list[tuple[str, ...]] = []
        self._pages_path = path / "pages.dat"
        self._index_path = path / "index.dat"
        self._compressed_slots: list[int] = []
        self._dirty = False
        if create:
            self._pages_path.write_bytes(b"")
            self._index_path.write_bytes(b"")
        else:
            self._load()
        self._pages_fh = self._pages_path.open("r+b")
        self._index_fh = self._index_path.open("ab")

    # -- persistence -------------------------------------------------------

    def _load(self) -> None:
        raw = self._pages_path.read_bytes()
        if self.codec is Codec.NONE:
            for off in range(0, len(raw), PAGE_SIZE):
                self._attach_page(bytearray(raw[off : off + PAGE_SIZE]))
        else:
            self._load_compressed(raw)
        buf = self._index_path.read_bytes()
        off = 0
        nkey = len(self.schema.primary_key)
        while off < len(buf):
            entry_len, off = read_u32(buf, off)
            end = off + entry_len
            key = []
            for _ in range(nkey):
                n, off = read_u32(buf, off)
                key.append(buf[off : off + n].decode("utf-8"))
                off += n
            page, off = read_u32(buf, off)
            slot, off = read_u32(buf, off)
            self._index[tuple(key)] = (page, slot)
            assert off == end
        self._sorted_keys = sorted(self._index)

    def _load_compressed(self, raw: bytes) -> None:
        # blocks may split one logical page; records re-append in block order
        off = 0
        while off < len(raw):
            page_no, off = read_u32(raw, off)
            slot_size, off = read_u32(raw, off)
            comp_len, off = read_u32(raw, off)
            image = decompress_block(self.codec, raw[off : off + comp_len])
            off += slot_size - 12
            while page_no >= len(self._pages):
                self._attach_page(_new_page())
            self._compressed_slots.append(slot_size)
            for frame in _page_frames(image):
                self._append_to_page(page_no, frame)

    def _attach_page(self, page: bytearray) -> None:
        self._pages.append(page)
        offsets = []
        for off in _page_frame_offsets(page):
            offsets.append(off)
        self._page_offsets.append(offsets)

    def _persist_page(self, pno: int) -> None:
        self._pages_fh.seek(pno * PAGE_SIZE)
        self._pages_fh.write(self._pages[pno])

    def _persist_record(self, pno: int, offset: int, frame: bytes) -> None:
        # write-through of just the header and the appended record
        base = pno * PAGE_SIZE
        self._pages_fh.seek(base)
        self._pages_fh.write(self._pages[pno][0:_PAGE_HEADER])
        self._pages_fh.seek(base + offset)
        self._pages_fh.write(frame)

    def _sync(self) -> None:
        self._pages_fh.flush()
        self._index_fh.flush()
        if self.engine.config.durability == "fsync":
            os.fsync(self._pages_fh.fileno())
            os.fsync(self._index_fh.fileno())

    def _persist_compressed(self) -> None:
        chunks: list[bytes] = []
        slots: list[int] = []
        target = self.engine.config.compressed_page_target
        for pno, offsets in enumerate(self._page_offsets):
            page = self._pages[pno]
            frames = [_frame_at(page, off) for off in offsets]
            for block, slot in _compress_frames(self.codec, pno, frames, target):
                chunks.append(block)
                slots.append(slot)
        self._pages_fh.seek(0)
        self._pages_fh.truncate()
        self._pages_fh.write(b"".join(chunks))
        self._compressed_slots = slots
        self._dirty = False

    def _persist_after_op(self, touched: Iterable[int]) -> None:
        if self.codec is Codec.NONE:
            for pno in sorted(set(touched)):
                self._persist_page(pno)
        else:
            self._persist_compressed()
        self._sync()

    def _append_index_entry(self, key: tuple[str, ...], page: int, slot: int) -> None:
        payload = b"".join(pack_u32(len(k.encode())) + k.encode() for k in key)
        payload += pack_u32(page) + pack_u32(slot)
        self._index_fh.write(pack_u32(len(payload)) + payload)

    # -- placement ---------------------------------------------------------

    def _append_to_page(self, pno: int, frame: bytes) -> tuple[int, int]:
        page = self._pages[pno]
        (slot_count,) = (int.from_bytes(page[0:4], "little"),)
        free_off = int.from_bytes(page[4:8], "little")
        page[free_off : free_off + len(frame)] = frame
        page[0:4] = pack_u32(slot_count + 1)
        page[4:8] = pack_u32(free_off + len(frame))
        self._page_offsets[pno].append(free_off)
        return slot_count, free_off

    def _place(self, frame: bytes) -> tuple[int, int, int]:
        """Returns (page, slot, offset); allocates a new page when needed."""
        if len(frame) > PAGE_SIZE - _PAGE_HEADER:
            raise StorageError("record larger than a page")
        if not self._pages or _free_bytes(self._pages[-1]) < len(frame):
            self._pages.append(_new_page())
            self._page_offsets.append([])
            if self.codec is Codec.NONE:
                self._persist_page(len(self._pages) - 1)
        pno = len(self._pages) - 1
        slot, offset = self._append_to_page(pno, frame)
        return pno, slot, offset

    def _add_record(self, record: Record) -> tuple[int, bytes]:
        self.schema.validate_record(record)
        key = self.schema.key_of(record)
        if key in self._index:
            raise DuplicateKeyError(key)
        frame_payload = self.encode_record(record)
        frame = pack_u32(len(frame_payload)) + frame_payload
        pno, slot, offset = self._place(frame)
        self._index[key] = (pno, slot)
        bisect.insort(self._sorted_keys, key)
        self._append_index_entry(key, pno, slot)
        if self.codec is Codec.NONE:
            self._persist_record(pno, offset, frame)
        else:
            self._dirty = True
        return pno, frame

    # -- interface ---------------------------------------------------------

    def insert(self, record: Record) -> None:
        t0 = self._clock()
        self._add_record(record)
        if self.codec is not Codec.NONE:
            self._persist_compressed()
        self._sync()
        self.engine.metrics.write_seconds += self._clock() - t0

    def insert_batch(self, records: Iterable[Record], batch_size: int) -> None:
        if batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        t0 = self._clock()
        buffer_cap = self.engine.config.row_buffer_bytes
        chunk: list[Record] = []
        chunk_bytes = 0
        for record in records:
            chunk.append(record)
            chunk_bytes += sum(len(v.encode()) + 4 for v in record.values())
            if len(chunk) >= batch_size or chunk_bytes >= buffer_cap:
                self._apply_chunk(chunk)
                chunk, chunk_bytes = [], 0
        if chunk:
            self._apply_chunk(chunk)
        self.engine.metrics.write_seconds += self._clock() - t0

    def _apply_chunk(self, chunk: list[Record]) -> None:
        touched = set()
        for record in chunk:
            pno, _ = self._add_record(record)
            touched.add(pno)
        if self.codec is Codec.NONE:
            for pno in sorted(touched):
                self._persist_page(pno)
        else:
            self._persist_compressed()
        self._sync()

    def bulk_load(self, records: Iterable[Record]) -> LoadReport:
        """Mass load: sorts once, builds pages and the index in one pass."""
        t0 = self._clock()
        keyed = []
        for record in records:
            self.schema.validate_record(record)
            keyed.append((self.schema.key_of(record), record))
        keyed.sort(key=lambda kr: kr[0])
        for i in range(1, len(keyed)):
            if keyed[i][0] == keyed[i - 1][0]:
                raise DuplicateKeyError(keyed[i][0])
        for key, record in keyed:
            if key in self._index:
                raise DuplicateKeyError(key)
            payload = self.encode_record(record)
            frame = pack_u32(len(payload)) + payload
            if not self._pages or _free_bytes(self._pages[-1]) < len(frame):
                self._pages.append(_new_page())
                self._page_offsets.append([])
            pno = len(self._pages) - 1
            slot, _ = self._append_to_page(pno, frame)
            self._index[key] = (pno, slot)
            self._append_index_entry(key, pno, slot)
        self._sorted_keys = sorted(self._index)
        if self.codec is Codec.NONE:
            self._pages_fh.seek(0)
            self._pages_fh.truncate()
            self._pages_fh.write(b"".join(bytes(p) for p in self._pages))
        else:
            self._persist_compressed()
        self._sync()
        elapsed = self._clock() - t0
        self.engine.metrics.write_seconds += elapsed
        return LoadReport(records_loaded=len(keyed), elapsed=elapsed)

    def scan(self, projection=None, predicate: KeyRange | None = None) -> Iterator[Record]:
        projection = self._check_projection(projection)
        t0 = self._clock()
        out: list[Record] = []
        keys = self._sorted_keys
        start = 0
        if predicate is not None and predicate.low is not None:
            start = bisect.bisect_left(keys, predicate.low)
        for i in range(start, len(keys)):
            key = keys[i]
            if predicate is not None:
                if predicate.high is not None and key[: len(predicate.high)] > predicate.high:
                    break
                if not predicate.admits(key):
                    continue
            pno, slot = self._index[key]
            off = self._page_offsets[pno][slot]
            # whole record is read, then projected
            record = self.decode_record(self._pages[pno], off + 4)
            out.append({c: record[c] for c in projection})
        self.engine.metrics.read_seconds += self._clock() - t0
        return iter(out)

    def flush(self):
        raise UnsupportedOperationError("flush is a column-engine operation")

    def compact(self):
        raise UnsupportedOperationError("compact is a column-engine operation")

    def disk_usage(self) -> int:
        """Data bytes only: whole-block accounting, index bytes excluded."""
        if self.codec is Codec.NONE:
            return len(self._pages) * PAGE_SIZE
        if self._dirty:
            self._persist_compressed()
        return sum(self._compressed_slots)

    def compressed_slot_sizes(self) -> list[int]:
        if self._dirty:
            self._persist_compressed()
        return list(self._compressed_slots)

    @property
    def record_count(self) -> int:
        return len(self._index)

    def close(self) -> None:
        if not self._pages_fh.closed:
            self._pages_fh.close()
        if not self._index_fh.closed:
            self._index_fh.close()


def _free_bytes(page: bytearray) -> int:
    return PAGE_SIZE - int.from_bytes(page[4:8], "little")


def _page_frame_offsets(page: bytes) -> list[int]:
    offsets = []
    slot_count = int.from_bytes(page[0:4], "little")
    off = _PAGE_HEADER
    for _ in range(slot_count):
        offsets.append(off)
        n = int.from_bytes(page[off : off + 4], "little")
        off += 4 + n
    return offsets


def _frame_at(page: bytes, off: int) -> bytes:
    n = int.from_bytes(page[off : off + 4], "little")
    return bytes(page[off : off + 4 + n])


def _page_frames(image: bytes) -> list[bytes]:
    return [_frame_at(image, off) for off in _page_frame_offsets(image)]


def _build_image(frames: list[bytes]) -> bytes:
    body = b"".join(frames)
    return pack_u32(len(frames)) + pack_u32(_PAGE_HEADER + len(body)) + body


def _compress_frames(
    codec: Codec, page_no: int, frames: list[bytes], target: int
) -> list[tuple[bytes, int]]:
    """Compress a page's record frames into legal slots, splitting when oversize."""
    comp = compress_block(codec, _build_image(frames))
    framed_len = 12 + len(comp)
    if framed_len <= target:
        slot = target
    elif len(frames) <= 1:
        slot = next(
            (s for s in ALLOWED_COMPRESSED_PAGE_SIZES if s >= framed_len and s > target),
            None,
        )
        if slot is None:
            raise CompressionError("compressed page does not fit the largest legal slot")
    else:
        mid = len(frames) // 2
        return _compress_frames(codec, page_no, frames[:mid], target) + _compress_frames(
            codec, page_no, frames[mid:], target
        )
    block = pack_u32(page_no) + pack_u32(slot) + pack_u32(len(comp)) + comp
    block += b"\x00" * (slot - len(block))
    return [(block, slot)]


class RowEngine(StorageEngine):
    kind = "row"
    _table_cls = RowTable
