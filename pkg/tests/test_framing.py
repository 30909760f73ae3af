"""Frame codec: round trips, stream splitting, size caps."""

import random
import struct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from npptwin.twin.framing import (
    FrameDecoder,
    FramingError,
    MAX_FRAME_BYTES,
    encode_frame,
    split_payload,
)


class TestEncode:
    def test_layout(self):
        frame = encode_frame(7, b"vget /sim/time")
        length = struct.unpack("<I", frame[:4])[0]
        assert length == len(frame) - 4
        assert frame[4:] == b"7:vget /sim/time"

    def test_id_must_be_digits(self):
        with pytest.raises(FramingError):
            encode_frame("x1", b"body")

    def test_oversize_rejected(self):
        with pytest.raises(FramingError):
            encode_frame(1, b"x" * MAX_FRAME_BYTES)


class TestDecode:
    def test_single_frame(self):
        dec = FrameDecoder()
        assert dec.feed(encode_frame(42, b"hello")) == [("42", b"hello")]

    def test_byte_at_a_time(self):
        dec = FrameDecoder()
        frame = encode_frame(3, b"pay\x00load\xff")
        out = []
        for i in range(len(frame)):
            out += dec.feed(frame[i : i + 1])
        assert out == [("3", b"pay\x00load\xff")]

    def test_concatenated_stream_splits_exactly(self):
        rng = random.Random(5)
        frames = [
            (str(i), bytes(rng.getrandbits(8) for _ in range(rng.randint(0, 300))))
            for i in range(50)
        ]
        blob = b"".join(encode_frame(i, b) for i, b in frames)
        dec = FrameDecoder()
        out = []
        # Feed in random chunk sizes.
        pos = 0
        while pos < len(blob):
            n = rng.randint(1, 97)
            out += dec.feed(blob[pos : pos + n])
            pos += n
        assert out == frames
        assert dec.pending_bytes == 0

    def test_declared_oversize_rejected(self):
        dec = FrameDecoder()
        with pytest.raises(FramingError):
            dec.feed(struct.pack("<I", MAX_FRAME_BYTES + 1) + b"x")

    def test_payload_without_id_rejected(self):
        with pytest.raises(FramingError):
            split_payload(b"no colon here")
        with pytest.raises(FramingError):
            split_payload(b":empty id")
        with pytest.raises(FramingError):
            split_payload(b"12x:not digits")


class TestRoundTrip:
    @settings(max_examples=200, deadline=None)
    @given(st.integers(min_value=0, max_value=10**12), st.binary(max_size=2048))
    def test_encode_decode_identity(self, req_id, body):
        frame = encode_frame(req_id, body)
        dec = FrameDecoder()
        [(out_id, out_body)] = dec.feed(frame)
        assert out_id == str(req_id)
        assert out_body == body
        assert encode_frame(out_id, out_body) == frame
