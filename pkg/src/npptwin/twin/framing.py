"""Length-prefixed request/response framing for the bridge protocol.

Frame layout on the wire:

    [length: u32 little-endian] [payload: length bytes]

where the payload is ``<id>:<body>``: the id is one or more decimal
digits, the colon is literal, and the body is UTF-8 text for requests
and text or binary (text prefix + raw image bytes) for responses.  Ids
echo back verbatim; payloads are capped at 16 MiB.
"""

from __future__ import annotations

import struct

MAX_FRAME_BYTES = 16 * 1024 * 1024

_HEADER = struct.Struct("<I")


class FramingError(ValueError):
    pass


def encode_frame(request_id: int | str, body: bytes) -> bytes:
    id_bytes = str(request_id).encode("ascii")
    if not id_bytes.isdigit():
        raise FramingError(f"frame id must be decimal digits, got {request_id!r}")
    payload = id_bytes + b":" + body
    if len(payload) > MAX_FRAME_BYTES:
        raise FramingError(f"payload of {len(payload)} bytes exceeds 16 MiB")
    return _HEADER.pack(len(payload)) + payload


def split_payload(payload: bytes) -> tuple[str, bytes]:
    colon = payload.find(b":")
    if colon < 1:
        raise FramingError("payload must start with <id>:")
    id_bytes = payload[:colon]
    if not id_bytes.isdigit():
        raise FramingError(f"frame id must be decimal digits, got {id_bytes!r}")
    return id_bytes.decode("ascii"), payload[colon + 1 :]


class FrameDecoder:
    """Incremental decoder: feed arbitrary chunks, collect whole frames."""

    def __init__(self) -> None:
        self._buf = bytearray()

    def feed(self, data: bytes) -> list[tuple[str, bytes]]:
        self._buf.extend(data)
        frames = []
        while True:
            if len(self._buf) < 4:
                return frames
            (length,) = _HEADER.unpack_from(self._buf)
            if length > MAX_FRAME_BYTES:
                raise FramingError(f"declared payload of {length} bytes exceeds 16 MiB")
            if len(self._buf) < 4 + length:
                return frames
            payload = bytes(self._buf[4 : 4 + length])
            del self._buf[: 4 + length]
            frames.append(split_payload(payload))

    @property
    def pending_bytes(self) -> int:
        return len(self._buf)
