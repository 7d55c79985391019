"""Deflate-based block compression with two framings.

Both framings wrap the same raw deflate stream; they differ only in the
framing overhead: the zlib framing spends 6 bytes (2-byte header plus
4-byte Adler-32 trailer), the gzip framing 18 bytes (10-byte header plus
CRC-32 and length trailer). Frames are built by hand so the overheads are
byte-exact and the output deterministic.
"""

from __future__ import annotations

import enum
import struct
import zlib

from ..errors import CompressionError

ZLIB_OVERHEAD = 6
GZIP_OVERHEAD = 18

_ZLIB_HEADER = b"\x78\x9c"
_GZIP_HEADER = b"\x1f\x8b\x08\x00\x00\x00\x00\x00\x00\xff"


class Codec(enum.Enum):
    NONE = "none"
    ZLIB = "zlib"
    GZIP = "gzip"


def _deflate(data: bytes) -> bytes:
    co = zlib.compressobj(level=6, wbits=-zlib.MAX_WBITS)
    return co.compress(data) + co.flush()


def compress_block(codec: Codec, data: bytes) -> bytes:
    if codec is Codec.NONE:
        return data
    body = _deflate(data)
    if codec is Codec.ZLIB:
        return _ZLIB_HEADER + body + struct.pack(">I", zlib.adler32(data))
    return (
        _GZIP_HEADER
        + body
        + struct.pack("<II", zlib.crc32(data), len(data) & 0xFFFFFFFF)
    )


def decompress_block(codec: Codec, data: bytes) -> bytes:
    if codec is Codec.NONE:
        return data
    try:
        if codec is Codec.ZLIB:
            if len(data) < ZLIB_OVERHEAD or data[:1] != b"\x78":
                raise CompressionError("bad zlib frame header")
            out = zlib.decompress(data[2:-4], wbits=-zlib.MAX_WBITS)
            (adler,) = struct.unpack(">I", data[-4:])
            if zlib.adler32(out) != adler:
                raise CompressionError("zlib frame checksum mismatch")
            return out
        if len(data) < GZIP_OVERHEAD or data[:3] != b"\x1f\x8b\x08":
            raise CompressionError("bad gzip frame header")
        out = zlib.decompress(data[10:-8], wbits=-zlib.MAX_WBITS)
        crc, size = struct.unpack("<II", data[-8:])
        if zlib.crc32(out) != crc or len(out) & 0xFFFFFFFF != size:
            raise CompressionError("gzip frame checksum mismatch")
        return out
    except zlib.error as exc:
        raise CompressionError(f"corrupt deflate stream: {exc}") from exc
