import gzip
import random
import zlib

import pytest
from hypothesis import given, strategies as st

from procmine.errors import CompressionError
from procmine.storage.compress import (
    GZIP_OVERHEAD,
    ZLIB_OVERHEAD,
    Codec,
    compress_block,
    decompress_block,
)

CODECS = [Codec.ZLIB, Codec.GZIP]


class TestRoundTrip:
    @pytest.mark.parametrize("codec", CODECS)
    @pytest.mark.parametrize(
        "payload", [b"", b"x", b"hello world", b"\x00" * 1000, bytes(range(256)) * 64]
    )
    def test_fixed_payloads(self, codec, payload):
        assert decompress_block(codec, compress_block(codec, payload)) == payload

    @pytest.mark.parametrize("codec", CODECS)
    @given(st.binary(max_size=4096))
    def test_random_payloads(self, codec, payload):
        assert decompress_block(codec, compress_block(codec, payload)) == payload

    def test_none_is_identity(self):
        assert compress_block(Codec.NONE, b"abc") == b"abc"
        assert decompress_block(Codec.NONE, b"abc") == b"abc"


class TestFraming:
    def test_empty_payload_overheads(self):
        z = compress_block(Codec.ZLIB, b"")
        g = compress_block(Codec.GZIP, b"")
        body = len(z) - ZLIB_OVERHEAD
        assert len(z) == body + 6
        assert len(g) == body + 18
        assert len(g) - len(z) == 12

    def test_overhead_delta_is_12_for_any_payload(self):
        rng = random.Random(9)
        for _ in range(50):
            payload = rng.randbytes(rng.randint(0, 2000))
            z = compress_block(Codec.ZLIB, payload)
            g = compress_block(Codec.GZIP, payload)
            assert len(g) - len(z) == GZIP_OVERHEAD - ZLIB_OVERHEAD == 12

    def test_stdlib_decoders_accept_our_frames(self):
        payload = b"interoperability check " * 40
        assert zlib.decompress(compress_block(Codec.ZLIB, payload)) == payload
        assert gzip.decompress(compress_block(Codec.GZIP, payload)) == payload

    def test_deterministic(self):
        payload = b"same bytes in, same bytes out"
        for codec in CODECS:
            assert compress_block(codec, payload) == compress_block(codec, payload)


class TestCorruption:
    @pytest.mark.parametrize("codec", CODECS)
    def test_flipped_body_byte(self, codec):
        frame = bytearray(compress_block(codec, b"abcdefgh" * 100))
        frame[len(frame) // 2] ^= 0xFF
        with pytest.raises(CompressionError):
            decompress_block(codec, bytes(frame))

    @pytest.mark.parametrize("codec", CODECS)
    def test_flipped_checksum(self, codec):
        frame = bytearray(compress_block(codec, b"payload"))
        frame[-1] ^= 0xFF
        with pytest.raises(CompressionError):
            decompress_block(codec, bytes(frame))

    @pytest.mark.parametrize("codec", CODECS)
    def test_bad_header(self, codec):
        with pytest.raises(CompressionError):
            decompress_block(codec, b"\x00\x00\x00\x00\x00\x00\x00\x00\x00\x00")

    @pytest.mark.parametrize("codec", CODECS)
    def test_truncated_frame(self, codec):
        with pytest.raises(CompressionError):
            decompress_block(codec, b"\x78")
